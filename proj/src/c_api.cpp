#include "oband/oband.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "oband/log.hpp"
#include "oband/report.hpp"
#include "oband/system_model.hpp"

struct oband_system {
    oband::SystemModel model;
};

struct oband_report {
    oband::Report report;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_field;

void clear_error()
{
    g_error.clear();
    g_field.clear();
}

oband_status fail(oband_status s, const std::string& msg, const std::string& field = {})
{
    g_error = msg;
    g_field = field;
    return s;
}

oband_status status_of(oband::ErrorKind k)
{
    switch (k) {
    case oband::ErrorKind::validation: return OBAND_E_VALIDATION;
    case oband::ErrorKind::numeric: return OBAND_E_NUMERIC;
    case oband::ErrorKind::budget: return OBAND_E_BUDGET;
    case oband::ErrorKind::io: return OBAND_E_IO;
    }
    return OBAND_E_INTERNAL;
}

template <class F>
oband_status guarded(F&& f)
{
    clear_error();
    try {
        return f();
    } catch (const oband::Error& e) {
        return fail(status_of(e.kind()), e.what(), e.field());
    } catch (const std::bad_alloc&) {
        return fail(OBAND_E_BUDGET, "out of memory");
    } catch (const std::exception& e) {
        return fail(OBAND_E_INTERNAL, e.what());
    } catch (...) {
        return fail(OBAND_E_INTERNAL, "unknown failure");
    }
}

std::vector<std::size_t> channel_list(const oband_system* sys, const size_t* channels, size_t n)
{
    std::vector<std::size_t> out;
    if (!channels) return out;
    for (size_t q = 0; q < n; ++q) {
        if (channels[q] >= sys->model.grid.size()) {
            std::ostringstream os;
            os << "channel index " << channels[q] << " out of range (" << sys->model.grid.size() << " channels)";
            throw oband::Error(oband::ErrorKind::validation, os.str());
        }
        out.push_back(channels[q]);
    }
    return out;
}

oband_status emit(oband::Report r, oband_report** out)
{
    *out = new oband_report{std::move(r)};
    return OBAND_OK;
}

}  // namespace

extern "C" {

const char* oband_version(void) { return "0.1.0"; }

const char* oband_status_name(oband_status s)
{
    switch (s) {
    case OBAND_OK: return "ok";
    case OBAND_E_VALIDATION: return "validation";
    case OBAND_E_NUMERIC: return "numeric";
    case OBAND_E_BUDGET: return "budget";
    case OBAND_E_IO: return "io";
    case OBAND_E_ARGUMENT: return "argument";
    case OBAND_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* oband_last_error(void) { return g_error.c_str(); }
const char* oband_last_error_field(void) { return g_field.c_str(); }

void oband_set_log_level(oband_log_level level)
{
    oband::set_log_level(static_cast<oband::LogLevel>(level));
}

oband_status oband_system_load(const char* path, oband_system** out)
{
    if (!path || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new oband_system{oband::load_config(path)};
        return OBAND_OK;
    });
}

oband_status oband_system_parse(const char* json_text, oband_system** out)
{
    if (!json_text || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new oband_system{oband::parse_config(json_text)};
        return OBAND_OK;
    });
}

void oband_system_free(oband_system* sys) { delete sys; }

oband_status oband_system_channel_count(const oband_system* sys, size_t* out)
{
    if (!sys || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    clear_error();
    *out = sys->model.grid.size();
    return OBAND_OK;
}

oband_status oband_system_set_threads(oband_system* sys, int threads)
{
    if (!sys) return fail(OBAND_E_ARGUMENT, "null argument");
    if (threads < 1) return fail(OBAND_E_ARGUMENT, "threads must be at least 1");
    clear_error();
    sys->model.engine.threads = threads;
    return OBAND_OK;
}

oband_status oband_system_set_spans(oband_system* sys, int n_spans)
{
    if (!sys) return fail(OBAND_E_ARGUMENT, "null argument");
    if (n_spans < 1) return fail(OBAND_E_VALIDATION, "n_spans must be at least 1", "/grid/n_spans");
    clear_error();
    sys->model.grid.n_spans = n_spans;
    sys->model.grid.per_span_power_scale.clear();
    return OBAND_OK;
}

oband_status oband_system_set_oracle_resolution(oband_system* sys, int samples_per_channel, double z_steps_per_km)
{
    if (!sys) return fail(OBAND_E_ARGUMENT, "null argument");
    if (samples_per_channel < 0 || !(z_steps_per_km >= 0.0))
        return fail(OBAND_E_VALIDATION, "oracle resolution must be positive", "/engine/oracle");
    clear_error();
    if (samples_per_channel > 0) sys->model.engine.oracle.riemann_samples_per_axis = samples_per_channel;
    if (z_steps_per_km > 0.0) sys->model.engine.oracle.z_steps_per_km = z_steps_per_km;
    return OBAND_OK;
}

oband_status oband_validate_file(const char* path, oband_report** out)
{
    if (!path || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] {
        std::ifstream in(path, std::ios::binary);
        if (!in) return fail(OBAND_E_IO, std::string("cannot open ") + path);
        std::stringstream ss;
        ss << in.rdbuf();
        const auto diags = oband::validate_config_text(ss.str());
        emit(oband::validate_report(diags), out);
        if (diags.empty()) return OBAND_OK;
        return fail(OBAND_E_VALIDATION, diags.front().message, diags.front().field);
    });
}

oband_status oband_fit(const oband_system* sys, oband_report** out)
{
    if (!sys || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] { return emit(oband::run_fit(sys->model), out); });
}

oband_status oband_estimate(const oband_system* sys, const size_t* channels, size_t n_channels, oband_report** out)
{
    if (!sys || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] { return emit(oband::run_estimate(sys->model, channel_list(sys, channels, n_channels)), out); });
}

oband_status oband_oracle(const oband_system* sys, const size_t* channels, size_t n_channels, oband_report** out)
{
    if (!sys || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] { return emit(oband::run_oracle(sys->model, channel_list(sys, channels, n_channels)), out); });
}

oband_status oband_compare(const oband_system* sys, const size_t* channels, size_t n_channels, oband_report** out)
{
    if (!sys || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] { return emit(oband::run_compare(sys->model, channel_list(sys, channels, n_channels)), out); });
}

oband_status oband_sweep(const oband_system* sys, const char* axis, const double* values, size_t n_values,
                         int compare, const size_t* channels, size_t n_channels, oband_report** out)
{
    if (!sys || !axis || !out || (n_values > 0 && !values)) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] {
        const auto ax = oband::parse_sweep_axis(axis);
        std::vector<double> v(values, values + n_values);
        return emit(oband::run_sweep(sys->model, ax, v, compare != 0, channel_list(sys, channels, n_channels)), out);
    });
}

size_t oband_report_rows(const oband_report* r) { return r ? r->report.rows.size() : 0; }
size_t oband_report_columns(const oband_report* r) { return r ? r->report.columns.size() : 0; }
const char* oband_report_kind(const oband_report* r) { return r ? r->report.kind.c_str() : ""; }

const char* oband_report_column_name(const oband_report* r, size_t column)
{
    if (!r || column >= r->report.columns.size()) return nullptr;
    return r->report.columns[column].c_str();
}

namespace {
double cell_value(const oband::Cell& c)
{
    switch (c.kind) {
    case oband::Cell::Kind::number: return c.number;
    case oband::Cell::Kind::integer: return static_cast<double>(c.integer);
    default: return std::nan("");
    }
}
}  // namespace

oband_status oband_report_value(const oband_report* r, size_t row, size_t column, double* out)
{
    if (!r || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    if (row >= r->report.rows.size() || column >= r->report.columns.size())
        return fail(OBAND_E_ARGUMENT, "cell index out of range");
    clear_error();
    *out = cell_value(r->report.rows[row][column]);
    return OBAND_OK;
}

oband_status oband_report_summary(const oband_report* r, const char* key, double* out)
{
    if (!r || !key || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    for (const auto& [k, v] : r->report.summary) {
        if (k == key) {
            clear_error();
            *out = cell_value(v);
            return OBAND_OK;
        }
    }
    return fail(OBAND_E_ARGUMENT, std::string("no summary entry ") + key);
}

oband_status oband_report_render(const oband_report* r, oband_format format, char** out)
{
    if (!r || !out) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string s = oband::render(
            r->report, format == OBAND_FORMAT_JSON ? oband::ReportFormat::json : oband::ReportFormat::csv);
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
        return OBAND_OK;
    });
}

oband_status oband_report_write(const oband_report* r, const char* path, oband_format format)
{
    if (!r || !path) return fail(OBAND_E_ARGUMENT, "null argument");
    return guarded([&] {
        oband::write_report(r->report, path,
                            format == OBAND_FORMAT_JSON ? oband::ReportFormat::json : oband::ReportFormat::csv);
        return OBAND_OK;
    });
}

void oband_report_free(oband_report* r) { delete r; }
void oband_string_free(char* s) { std::free(s); }

}  // extern "C"
