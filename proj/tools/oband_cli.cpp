#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oband/oband.h"

namespace {

int exit_code(oband_status s)
{
    switch (s) {
    case OBAND_OK: return 0;
    case OBAND_E_VALIDATION:
    case OBAND_E_ARGUMENT:
    case OBAND_E_IO: return 1;
    case OBAND_E_BUDGET: return 3;
    default: return 2;
    }
}

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::string log_level = "warn";
    std::string channels;
    int threads = 1;
    long long seed = 0;
    bool error_json = false;
    int samples = 0;
    double z_steps = 0.0;
    std::string axis;
    std::string values;
    bool compare = false;
};

int report_failure(const Options& o, oband_status s)
{
    if (o.error_json) {
        nlohmann::ordered_json j;
        j["error"]["status"] = oband_status_name(s);
        j["error"]["code"] = exit_code(s);
        j["error"]["message"] = oband_last_error();
        j["error"]["field"] = oband_last_error_field();
        std::cout << j.dump() << "\n";
    } else {
        std::cerr << "oband: " << oband_status_name(s) << " error: " << oband_last_error();
        if (*oband_last_error_field()) std::cerr << " (at " << oband_last_error_field() << ")";
        std::cerr << "\n";
    }
    return exit_code(s);
}

oband_format pick_format(const Options& o)
{
    if (o.format == "json") return OBAND_FORMAT_JSON;
    if (o.format == "csv") return OBAND_FORMAT_CSV;
    if (o.out.size() >= 5 && o.out.compare(o.out.size() - 5, 5, ".json") == 0) return OBAND_FORMAT_JSON;
    return OBAND_FORMAT_CSV;
}

int emit(const Options& o, oband_report* r)
{
    oband_status s;
    if (!o.out.empty()) {
        s = oband_report_write(r, o.out.c_str(), pick_format(o));
    } else {
        char* text = nullptr;
        s = oband_report_render(r, pick_format(o), &text);
        if (s == OBAND_OK) {
            std::fputs(text, stdout);
            oband_string_free(text);
        }
    }
    if (s != OBAND_OK) return report_failure(o, s);
    return 0;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// 1-based channel list on the command line, 0-based in the library.
bool parse_channels(const std::string& s, std::vector<size_t>& out)
{
    for (const auto& tok : split(s)) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(tok, &used);
            if (used != tok.size() || v < 1) return false;
            out.push_back(static_cast<size_t>(v - 1));
        } catch (...) {
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"O-band NLI and SNR estimator"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "system configuration (JSON)");
    app.add_option("--out", o.out, "output file (stdout when omitted)");
    app.add_option("--format", o.format, "csv or json (default: from --out extension, else csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "accepted for reproducibility scripts; the engine is deterministic");
    app.add_option("--log-level", o.log_level, "error, warn, info or debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
    app.add_flag("--error-json", o.error_json, "print failures as JSON on stdout");

    auto* validate = app.add_subcommand("validate", "check a configuration file");
    auto* fit = app.add_subcommand("fit", "per-channel ISRS fit parameters");
    auto* estimate = app.add_subcommand("estimate", "closed-form NLI and SNR per channel");
    auto* oracle = app.add_subcommand("oracle", "numerical integral model per channel");
    auto* compare = app.add_subcommand("compare", "closed form against the integral model");
    auto* sweep = app.add_subcommand("sweep", "repeat estimate or compare along one axis");
    for (auto* sc : {validate, fit, estimate, oracle, compare, sweep})
        sc->add_option("config", o.config, "system configuration (JSON)");
    for (auto* sc : {estimate, oracle, compare, sweep})
        sc->add_option("--channels", o.channels, "1-based channel list, e.g. 1,21,41");
    for (auto* sc : {oracle, compare, sweep}) {
        sc->add_option("--samples", o.samples, "oracle samples per channel bandwidth")->check(CLI::PositiveNumber);
        sc->add_option("--z-steps", o.z_steps, "oracle z steps per km")->check(CLI::PositiveNumber);
    }
    sweep->add_option("--axis", o.axis, "spans, bandwidth (Hz) or power (dBm)")
        ->required()
        ->check(CLI::IsMember({"spans", "bandwidth", "power"}));
    sweep->add_option("--values", o.values, "comma-separated axis values")->required();
    sweep->add_flag("--compare", o.compare, "report CFM-vs-oracle statistics per value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const char* levels[] = {"error", "warn", "info", "debug"};
    for (int l = 0; l < 4; ++l)
        if (o.log_level == levels[l]) oband_set_log_level(static_cast<oband_log_level>(l));

    if (o.config.empty()) {
        std::cerr << "oband: a configuration file is required\n";
        return 1;
    }

    if (validate->parsed()) {
        oband_report* r = nullptr;
        oband_status s = oband_validate_file(o.config.c_str(), &r);
        if (s == OBAND_E_VALIDATION && r) {
            char* text = nullptr;
            if (o.error_json) {
                report_failure(o, s);
            } else if (oband_report_render(r, OBAND_FORMAT_CSV, &text) == OBAND_OK) {
                std::cerr << o.config << ": invalid\n" << text;
                oband_string_free(text);
            }
            oband_report_free(r);
            return 1;
        }
        oband_report_free(r);
        if (s != OBAND_OK) return report_failure(o, s);
        std::cout << o.config << ": ok\n";
        return 0;
    }

    std::vector<size_t> channels;
    if (!parse_channels(o.channels, channels)) {
        std::cerr << "oband: --channels expects positive integers separated by commas\n";
        return 1;
    }

    oband_system* sys = nullptr;
    oband_status s = oband_system_load(o.config.c_str(), &sys);
    if (s != OBAND_OK) return report_failure(o, s);
    oband_system_set_threads(sys, o.threads);
    if (o.samples > 0 || o.z_steps > 0.0) s = oband_system_set_oracle_resolution(sys, o.samples, o.z_steps);

    const size_t* ch = channels.empty() ? nullptr : channels.data();
    oband_report* r = nullptr;
    if (s != OBAND_OK) {
        // fall through to the failure report below
    } else if (fit->parsed()) {
        s = oband_fit(sys, &r);
    } else if (estimate->parsed()) {
        s = oband_estimate(sys, ch, channels.size(), &r);
    } else if (oracle->parsed()) {
        s = oband_oracle(sys, ch, channels.size(), &r);
    } else if (compare->parsed()) {
        s = oband_compare(sys, ch, channels.size(), &r);
        if (s == OBAND_OK) {
            double mean = 0.0, mx = 0.0;
            oband_report_summary(r, "mean_abs_db", &mean);
            oband_report_summary(r, "max_abs_db", &mx);
            std::fprintf(stderr, "mean |delta| %.3f dB, max |delta| %.3f dB\n", mean, mx);
        }
    } else if (sweep->parsed()) {
        std::vector<double> values;
        for (const auto& tok : split(o.values)) {
            try {
                values.push_back(std::stod(tok));
            } catch (...) {
                std::cerr << "oband: bad sweep value '" << tok << "'\n";
                oband_system_free(sys);
                return 1;
            }
        }
        s = oband_sweep(sys, o.axis.c_str(), values.data(), values.size(), o.compare ? 1 : 0, ch, channels.size(),
                        &r);
    }
    oband_system_free(sys);
    if (s != OBAND_OK) return report_failure(o, s);
    const int rc = emit(o, r);
    oband_report_free(r);
    return rc;
}
