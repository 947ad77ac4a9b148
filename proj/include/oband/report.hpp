#pragma once

#include <string>
#include <utility>
#include <vector>

#include "oband/cf_engine.hpp"
#include "oband/integral_oracle.hpp"
#include "oband/system_model.hpp"

namespace oband {

constexpr int kReportSchemaVersion = 1;

struct Cell {
    enum class Kind { null, number, integer, text };
    Kind kind = Kind::null;
    double number = 0.0;
    long long integer = 0;
    std::string text;

    static Cell num(double v);  // non-finite values become null
    static Cell integer_value(long long v);
    static Cell str(std::string v);
};

struct Report {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;

    std::size_t column(const std::string& name) const;  // throws when absent
};

enum class ReportFormat { csv, json };
ReportFormat parse_format(const std::string& s);

std::string to_csv(const Report& r);
std::string to_json(const Report& r);
std::string render(const Report& r, ReportFormat f);
void write_report(const Report& r, const std::string& path, ReportFormat f);

struct ComparisonStats {
    std::vector<double> deltas;  // CFM minus oracle SNR_NLI, dB
    double mean_abs = 0.0;
    double max_abs = 0.0;
    double argmax_wavelength_nm = 0.0;
};

ComparisonStats compare_stats(const std::vector<NliBreakdown>& cfm, const std::vector<OracleChannelResult>& oracle);

Report fit_report(const SystemModel& model, const std::vector<ChannelFit>& fits);
Report estimate_report(const std::vector<NliBreakdown>& rows);
Report oracle_report(const std::vector<OracleChannelResult>& rows);
Report compare_report(const std::vector<NliBreakdown>& cfm, const std::vector<OracleChannelResult>& oracle,
                      const ComparisonStats& stats);

// Runs; channel lists are 0-based and empty means all channels.
Report run_fit(const SystemModel& model);
Report run_estimate(const SystemModel& model, const std::vector<std::size_t>& channels);
Report run_oracle(const SystemModel& model, const std::vector<std::size_t>& channels);
Report run_compare(const SystemModel& model, const std::vector<std::size_t>& channels,
                   ComparisonStats* stats = nullptr);

enum class SweepAxis { spans, bandwidth, power };
SweepAxis parse_sweep_axis(const std::string& s);

// spans: span count; bandwidth: occupied optical bandwidth in Hz, keeping
// the channels whose centres lie within +-value/2 of the band centre;
// power: flat launch power in dBm.
SystemModel sweep_point(const SystemModel& model, SweepAxis axis, double value);

// With compare: one row per value with the CFM-vs-oracle statistics.
// Without: long format, one row per (value, channel) of the estimate.
Report run_sweep(const SystemModel& model, SweepAxis axis, const std::vector<double>& values, bool compare,
                 const std::vector<std::size_t>& channels);

Report validate_report(const std::vector<Diagnostic>& diags);

}  // namespace oband
