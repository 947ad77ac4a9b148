#include "oband/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace oband {

Cell Cell::num(double v)
{
    Cell c;
    if (std::isfinite(v)) {
        c.kind = Kind::number;
        c.number = v;
    }
    return c;
}

Cell Cell::integer_value(long long v)
{
    Cell c;
    c.kind = Kind::integer;
    c.integer = v;
    return c;
}

Cell Cell::str(std::string v)
{
    Cell c;
    c.kind = Kind::text;
    c.text = std::move(v);
    return c;
}

std::size_t Report::column(const std::string& name) const
{
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorKind::validation, "report has no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

ReportFormat parse_format(const std::string& s)
{
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw Error(ErrorKind::validation, "unknown format '" + s + "' (csv or json)");
}

namespace {

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_text(const Cell& c)
{
    switch (c.kind) {
    case Cell::Kind::null: return "null";
    case Cell::Kind::number: return format_number(c.number);
    case Cell::Kind::integer: return std::to_string(c.integer);
    case Cell::Kind::text: break;
    }
    if (c.text.find_first_of(",\"\n") == std::string::npos) return c.text;
    std::string out = "\"";
    for (char ch : c.text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Numbers go through the same text as the CSV so both payloads agree.
nlohmann::ordered_json json_value(const Cell& c)
{
    switch (c.kind) {
    case Cell::Kind::null: return nullptr;
    case Cell::Kind::number: return std::strtod(format_number(c.number).c_str(), nullptr);
    case Cell::Kind::integer: return c.integer;
    case Cell::Kind::text: return c.text;
    }
    return nullptr;
}

double db(double x) { return x > 0.0 ? 10.0 * std::log10(x) : NAN; }

double snr_db(double eta, double p) { return eta > 0.0 ? -10.0 * std::log10(eta * p * p) : NAN; }

double to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

}  // namespace

std::string to_csv(const Report& r)
{
    std::ostringstream os;
    os << "# oband report, schema_version=" << kReportSchemaVersion << ", kind=" << r.kind << "\n";
    for (const auto& [k, v] : r.summary) os << "# " << k << "=" << csv_text(v) << "\n";
    for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
    os << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_text(row[c]);
        os << "\n";
    }
    return os.str();
}

std::string to_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = r.kind;
    j["columns"] = r.columns;
    auto summary = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.summary) summary[k] = json_value(v);
    j["summary"] = summary;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        auto o = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) o[r.columns[c]] = json_value(row[c]);
        rows.push_back(o);
    }
    j["rows"] = rows;
    return j.dump(1) + "\n";
}

std::string render(const Report& r, ReportFormat f) { return f == ReportFormat::csv ? to_csv(r) : to_json(r); }

void write_report(const Report& r, const std::string& path, ReportFormat f)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
    out << render(r, f);
    if (!out) throw Error(ErrorKind::io, "failed writing " + path);
}

ComparisonStats compare_stats(const std::vector<NliBreakdown>& cfm, const std::vector<OracleChannelResult>& oracle)
{
    if (cfm.size() != oracle.size()) throw Error(ErrorKind::numeric, "comparison runs differ in length");
    ComparisonStats s;
    double sum = 0.0;
    for (std::size_t q = 0; q < cfm.size(); ++q) {
        const double d = cfm[q].snr_nli_db - oracle[q].breakdown.snr_nli_db;
        s.deltas.push_back(d);
        sum += std::abs(d);
        if (std::abs(d) > s.max_abs || q == 0) {
            s.max_abs = std::abs(d);
            s.argmax_wavelength_nm = cfm[q].wavelength * 1e9;
        }
    }
    if (!cfm.empty()) s.mean_abs = sum / static_cast<double>(cfm.size());
    return s;
}

Report fit_report(const SystemModel& model, const std::vector<ChannelFit>& fits)
{
    Report r;
    r.kind = "fit";
    r.columns = {"channel",     "wavelength_nm", "f_offset_hz", "alpha_i",         "alpha_tilde_i",
                 "cr_i",        "t_tilde_i",     "t_i",         "t_tilde_prime_i", "t_prime_i",
                 "residual_rms", "fallback"};
    const double fref = model.fibre.f_ref();
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const auto& f = fits[i];
        const double fo = model.grid[i].f;
        r.rows.push_back({Cell::integer_value(static_cast<long long>(i + 1)), Cell::num(wavelength_of(fo, fref) * 1e9),
                          Cell::num(fo), Cell::num(f.alpha), Cell::num(f.alpha_tilde), Cell::num(f.cr),
                          Cell::num(f.t_tilde), Cell::num(f.t), Cell::num(f.t_tilde_prime), Cell::num(f.t_prime),
                          Cell::num(f.residual_rms), Cell::integer_value(f.fallback ? 1 : 0)});
    }
    return r;
}

namespace {

const std::vector<std::string> kBreakdownColumns = {
    "channel",     "wavelength_nm", "f_offset_hz", "power_dbm",   "eta_spm_db",  "eta_xpm_db",  "eta_fwm_db",
    "eta_nli_db",  "snr_nli_db",    "snr_spm_db",  "snr_xpm_db",  "snr_fwm_db",  "snr_total_db", "eps_spm",
    "eps_xpm",     "eps_fwm",       "eps_total",   "eta_spm_inc", "eta_spm_cc",  "eta_xpm_inc", "eta_xpm_cc",
    "eta_fwm_inc", "eta_fwm_cc"};

std::vector<Cell> breakdown_cells(const NliBreakdown& b)
{
    const double p = b.power;
    return {Cell::integer_value(static_cast<long long>(b.channel + 1)),
            Cell::num(b.wavelength * 1e9),
            Cell::num(b.f_offset),
            Cell::num(to_dbm(p)),
            Cell::num(db(b.eta_spm())),
            Cell::num(db(b.eta_xpm())),
            Cell::num(db(b.eta_fwm())),
            Cell::num(db(b.eta_nli())),
            Cell::num(b.snr_nli_db),
            Cell::num(snr_db(b.eta_spm(), p)),
            Cell::num(snr_db(b.eta_xpm(), p)),
            Cell::num(snr_db(b.eta_fwm(), p)),
            b.has_snr_total ? Cell::num(b.snr_total_db) : Cell{},
            Cell::num(b.epsilon_spm),
            Cell::num(b.epsilon_xpm),
            Cell::num(b.epsilon_fwm),
            Cell::num(b.epsilon_total),
            Cell::num(b.eta_spm_inc),
            Cell::num(b.eta_spm_cc),
            Cell::num(b.eta_xpm_inc),
            Cell::num(b.eta_xpm_cc),
            Cell::num(b.eta_fwm_inc),
            Cell::num(b.eta_fwm_cc)};
}

}  // namespace

Report estimate_report(const std::vector<NliBreakdown>& rows)
{
    Report r;
    r.kind = "estimate";
    r.columns = kBreakdownColumns;
    r.columns.insert(r.columns.end(), {"n_triplets", "n_fallback", "fit_fallback"});
    for (const auto& b : rows) {
        auto cells = breakdown_cells(b);
        cells.push_back(Cell::integer_value(static_cast<long long>(b.n_triplets)));
        cells.push_back(Cell::integer_value(static_cast<long long>(b.n_fallback)));
        cells.push_back(Cell::integer_value(b.fit_fallback ? 1 : 0));
        r.rows.push_back(std::move(cells));
    }
    return r;
}

Report oracle_report(const std::vector<OracleChannelResult>& rows)
{
    Report r;
    r.kind = "oracle";
    r.columns = kBreakdownColumns;
    r.columns.insert(r.columns.end(), {"cells_spm", "cells_xpm", "cells_fwm"});
    for (const auto& o : rows) {
        auto cells = breakdown_cells(o.breakdown);
        cells.push_back(Cell::num(o.spm.cells));
        cells.push_back(Cell::num(o.xpm.cells));
        cells.push_back(Cell::num(o.fwm.cells));
        r.rows.push_back(std::move(cells));
    }
    return r;
}

Report compare_report(const std::vector<NliBreakdown>& cfm, const std::vector<OracleChannelResult>& oracle,
                      const ComparisonStats& stats)
{
    Report r;
    r.kind = "compare";
    r.columns = {"channel",         "wavelength_nm",  "f_offset_hz",    "snr_nli_cfm_db", "snr_nli_oracle_db",
                 "delta_db",        "snr_spm_cfm_db", "snr_spm_oracle_db", "snr_xpm_cfm_db", "snr_xpm_oracle_db",
                 "snr_fwm_cfm_db",  "snr_fwm_oracle_db"};
    for (std::size_t q = 0; q < cfm.size(); ++q) {
        const auto& a = cfm[q];
        const auto& b = oracle[q].breakdown;
        const double p = a.power;
        r.rows.push_back({Cell::integer_value(static_cast<long long>(a.channel + 1)), Cell::num(a.wavelength * 1e9),
                          Cell::num(a.f_offset), Cell::num(a.snr_nli_db), Cell::num(b.snr_nli_db),
                          Cell::num(stats.deltas[q]), Cell::num(snr_db(a.eta_spm(), p)),
                          Cell::num(snr_db(b.eta_spm(), p)), Cell::num(snr_db(a.eta_xpm(), p)),
                          Cell::num(snr_db(b.eta_xpm(), p)), Cell::num(snr_db(a.eta_fwm(), p)),
                          Cell::num(snr_db(b.eta_fwm(), p))});
    }
    r.summary = {{"mean_abs_db", Cell::num(stats.mean_abs)},
                 {"max_abs_db", Cell::num(stats.max_abs)},
                 {"argmax_wavelength_nm", Cell::num(stats.argmax_wavelength_nm)},
                 {"channels", Cell::integer_value(static_cast<long long>(cfm.size()))}};
    return r;
}

Report run_fit(const SystemModel& model)
{
    validate(model.fibre);
    validate(model.grid);
    return fit_report(model, fit_all(model.grid, model.fibre, model.engine));
}

Report run_estimate(const SystemModel& model, const std::vector<std::size_t>& channels)
{
    Engine engine(model);
    return estimate_report(engine.evaluate_all(channels));
}

Report run_oracle(const SystemModel& model, const std::vector<std::size_t>& channels)
{
    IntegralOracle oracle(model);
    return oracle_report(oracle.evaluate_all(channels));
}

Report run_compare(const SystemModel& model, const std::vector<std::size_t>& channels, ComparisonStats* stats)
{
    IntegralOracle oracle(model);
    // fail on the budget before spending time on the closed form
    const double cells = oracle.cell_count(channels);
    if (cells > model.engine.oracle.max_cells) oracle.evaluate_all(channels);
    Engine engine(model);
    const auto cfm = engine.evaluate_all(channels);
    const auto ref = oracle.evaluate_all(channels);
    ComparisonStats s = compare_stats(cfm, ref);
    if (stats) *stats = s;
    return compare_report(cfm, ref, s);
}

SweepAxis parse_sweep_axis(const std::string& s)
{
    if (s == "spans") return SweepAxis::spans;
    if (s == "bandwidth") return SweepAxis::bandwidth;
    if (s == "power") return SweepAxis::power;
    throw Error(ErrorKind::validation, "unknown sweep axis '" + s + "' (spans, bandwidth or power)");
}

SystemModel sweep_point(const SystemModel& model, SweepAxis axis, double value)
{
    SystemModel m = model;
    switch (axis) {
    case SweepAxis::spans: {
        if (!(value >= 1.0) || value != std::floor(value))
            throw Error(ErrorKind::validation, "span counts must be positive integers");
        m.grid.n_spans = static_cast<int>(value);
        m.grid.per_span_power_scale.clear();
        break;
    }
    case SweepAxis::bandwidth: {
        if (!(value > 0.0)) throw Error(ErrorKind::validation, "bandwidths must be positive");
        const double c = model.grid.raman_centre();
        std::vector<Channel> kept;
        for (const auto& ch : model.grid.channels)
            if (std::abs(ch.f - c) <= 0.5 * value + 1e-3) kept.push_back(ch);
        if (kept.empty()) throw Error(ErrorKind::validation, "bandwidth keeps no channels");
        m.grid.channels = std::move(kept);
        break;
    }
    case SweepAxis::power: {
        if (!std::isfinite(value)) throw Error(ErrorKind::validation, "powers must be finite");
        for (auto& ch : m.grid.channels) ch.P = dbm_to_w(value);
        break;
    }
    }
    validate(m.grid);
    return m;
}

Report run_sweep(const SystemModel& model, SweepAxis axis, const std::vector<double>& values, bool compare,
                 const std::vector<std::size_t>& channels)
{
    if (values.empty()) throw Error(ErrorKind::validation, "sweep needs at least one value");
    static const char* names[] = {"n_spans", "bandwidth_hz", "power_dbm"};
    const std::string axis_name = names[static_cast<int>(axis)];
    const std::vector<std::size_t> subset = (axis == SweepAxis::bandwidth) ? std::vector<std::size_t>{} : channels;

    Report r;
    r.kind = "sweep";
    if (compare) {
        r.columns = {axis_name, "channels", "mean_abs_db", "max_abs_db", "argmax_wavelength_nm"};
        for (double v : values) {
            const SystemModel m = sweep_point(model, axis, v);
            ComparisonStats s;
            run_compare(m, subset, &s);
            r.rows.push_back({Cell::num(v), Cell::integer_value(static_cast<long long>(s.deltas.size())),
                              Cell::num(s.mean_abs), Cell::num(s.max_abs), Cell::num(s.argmax_wavelength_nm)});
        }
        return r;
    }
    r.columns = kBreakdownColumns;
    r.columns.insert(r.columns.begin(), axis_name);
    for (double v : values) {
        const SystemModel m = sweep_point(model, axis, v);
        Engine engine(m);
        for (const auto& b : engine.evaluate_all(subset)) {
            auto cells = breakdown_cells(b);
            cells.insert(cells.begin(), Cell::num(v));
            r.rows.push_back(std::move(cells));
        }
    }
    return r;
}

Report validate_report(const std::vector<Diagnostic>& diags)
{
    Report r;
    r.kind = "validate";
    r.columns = {"line", "field", "message"};
    for (const auto& d : diags)
        r.rows.push_back({d.line > 0 ? Cell::integer_value(d.line) : Cell{}, Cell::str(d.field), Cell::str(d.message)});
    return r;
}

}  // namespace oband
