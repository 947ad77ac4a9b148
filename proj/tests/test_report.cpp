#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oband/report.hpp"
#include "support.hpp"

using namespace oband;
namespace ts = testing_support;

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text)
{
    Csv c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (c.header.empty())
            c.header = cells;
        else
            c.rows.push_back(cells);
    }
    return c;
}

double value(const Report& r, std::size_t row, const std::string& col)
{
    const Cell& c = r.rows[row][r.column(col)];
    if (c.kind == Cell::Kind::integer) return static_cast<double>(c.integer);
    return c.kind == Cell::Kind::number ? c.number : NAN;
}

}  // namespace

TEST_CASE("CSV and JSON carry the same payload")
{
    auto m = ts::table1(21, 3);
    m.engine.amplifier.enabled = false;
    const Report r = run_estimate(m, {});
    const Csv csv = parse_csv(to_csv(r));
    const auto json = nlohmann::json::parse(to_json(r));
    CHECK(json["schema_version"] == kReportSchemaVersion);
    CHECK(json["kind"] == "estimate");
    REQUIRE(csv.header == json["columns"].get<std::vector<std::string>>());
    REQUIRE(csv.rows.size() == json["rows"].size());
    std::size_t nulls = 0;
    for (std::size_t q = 0; q < csv.rows.size(); ++q) {
        REQUIRE(csv.rows[q].size() == csv.header.size());
        for (std::size_t c = 0; c < csv.header.size(); ++c) {
            const auto& j = json["rows"][q][csv.header[c]];
            const std::string& t = csv.rows[q][c];
            if (t == "null") {
                CHECK(j.is_null());
                ++nulls;
            } else {
                REQUIRE(j.is_number());
                CHECK(j.get<double>() == std::strtod(t.c_str(), nullptr));
            }
        }
    }
    // no amplifier: the total SNR is an explicit null in every row
    CHECK(nulls == csv.rows.size());
}

TEST_CASE("non-finite values become nulls")
{
    CHECK(Cell::num(NAN).kind == Cell::Kind::null);
    CHECK(Cell::num(INFINITY).kind == Cell::Kind::null);
    Report r;
    r.kind = "t";
    r.columns = {"a", "b"};
    r.rows.push_back({Cell::num(-HUGE_VAL), Cell::str("x,\"y\"")});
    CHECK(to_csv(r).find("null,\"x,\"\"y\"\"\"\n") != std::string::npos);
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j["rows"][0]["a"].is_null());
    CHECK(j["rows"][0]["b"] == "x,\"y\"");
    CHECK_THROWS_AS(r.column("c"), Error);
    CHECK_THROWS_AS(parse_format("xml"), Error);
}

TEST_CASE("estimate on the 161-channel system")
{
    const auto m = ts::table1(161, 1);
    const Report r = run_estimate(m, {});
    REQUIRE(r.rows.size() == 161);
    for (std::size_t q = 0; q < r.rows.size(); ++q) {
        for (const char* c : {"eps_spm", "eps_xpm", "eps_fwm", "eps_total"}) CHECK(value(r, q, c) == 0.0);
        for (const char* c : {"eta_spm_db", "eta_xpm_db", "eta_fwm_db", "eta_nli_db", "snr_nli_db"})
            CHECK(std::isfinite(value(r, q, c)));
    }
    // FWM dominates between 1299.4 and 1305.1 nm; one channel is ~0.57 nm here
    double lo = 1e9, hi = 0.0, fwm_min = 1e9, at = 0.0;
    for (std::size_t q = 0; q < r.rows.size(); ++q) {
        const double fwm = value(r, q, "snr_fwm_db"), lam = value(r, q, "wavelength_nm");
        if (fwm < value(r, q, "snr_spm_db") && fwm < value(r, q, "snr_xpm_db")) {
            lo = std::min(lo, lam);
            hi = std::max(hi, lam);
        }
        if (fwm < fwm_min) {
            fwm_min = fwm;
            at = lam;
        }
    }
    CHECK(lo == doctest::Approx(1299.4).epsilon(0.6 / 1299.4));
    CHECK(hi == doctest::Approx(1305.1).epsilon(0.6 / 1305.1));
    CHECK(at >= 1299.0);
    CHECK(at <= 1306.0);
}

TEST_CASE("reruns are byte-identical")
{
    auto m = ts::table1(31, 4);
    const std::string a = to_csv(run_estimate(m, {})) + to_json(run_estimate(m, {}));
    m.engine.threads = 3;
    const std::string b = to_csv(run_estimate(m, {})) + to_json(run_estimate(m, {}));
    CHECK(a == b);
    m.engine.oracle.riemann_samples_per_axis = 12;
    CHECK(to_csv(run_oracle(m, {0, 15})) == to_csv(run_oracle(m, {0, 15})));
}

TEST_CASE("compare")
{
    SUBCASE("one channel at large dispersion")
    {
        auto m = ts::table1(1, 1);
        m.fibre.dispersion_D = 17e-6;
        m.engine.oracle.riemann_samples_per_axis = 200;
        ComparisonStats s;
        const Report r = run_compare(m, {}, &s);
        REQUIRE(s.deltas.size() == 1);
        CHECK(std::fabs(s.deltas[0]) <= 0.2);
        CHECK(value(r, 0, "delta_db") == doctest::Approx(s.deltas[0]));
    }
    SUBCASE("subset length and summary")
    {
        auto m = ts::table1(9, 1);
        m.engine.oracle.riemann_samples_per_axis = 20;
        ComparisonStats s;
        const Report r = run_compare(m, {0, 4, 8}, &s);
        CHECK(s.deltas.size() == 3);
        CHECK(r.rows.size() == 3);
        CHECK(s.mean_abs <= s.max_abs);
        CHECK(value(r, 1, "channel") == 5);
        bool found = false;
        for (std::size_t q = 0; q < 3; ++q)
            if (std::fabs(s.deltas[q]) == s.max_abs) found |= value(r, q, "wavelength_nm") == s.argmax_wavelength_nm;
        CHECK(found);
    }
    SUBCASE("budget is checked first")
    {
        auto m = ts::table1(41, 1);
        m.engine.oracle.max_cells = 1e3;
        try {
            run_compare(m, {});
            FAIL("expected a budget error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::budget);
        }
    }
}

TEST_CASE("sweeps")
{
    const auto base = ts::table1(9, 1, -2.0, 0.0);
    SUBCASE("power without Raman leaves eta unchanged")
    {
        const Report r = run_sweep(base, SweepAxis::power, {-4, -2, 0, 2}, false, {});
        REQUIRE(r.rows.size() == 4 * 9);
        for (std::size_t q = 9; q < r.rows.size(); ++q)
            for (const char* c : {"eta_spm_db", "eta_xpm_db", "eta_fwm_db", "eta_nli_db"})
                CHECK(value(r, q, c) == value(r, q % 9, c));
        CHECK(value(r, 27, "power_dbm") == doctest::Approx(2.0));
    }
    SUBCASE("power with Raman moves eta")
    {
        const Report r = run_sweep(ts::table1(9, 1), SweepAxis::power, {-4, 2}, false, {0});
        CHECK(value(r, 0, "eta_nli_db") != value(r, 1, "eta_nli_db"));
    }
    SUBCASE("spans with comparison")
    {
        auto m = ts::table1(3, 1);
        m.engine.oracle.riemann_samples_per_axis = 20;
        const Report r = run_sweep(m, SweepAxis::spans, {1, 2, 3}, true, {});
        REQUIRE(r.rows.size() == 3);
        for (std::size_t q = 0; q < 3; ++q) {
            CHECK(value(r, q, "n_spans") == q + 1);
            CHECK(value(r, q, "channels") == 3);
            CHECK(value(r, q, "mean_abs_db") <= value(r, q, "max_abs_db"));
        }
    }
    SUBCASE("bandwidth keeps the central channels")
    {
        const Report r = run_sweep(base, SweepAxis::bandwidth, {250e9, 450e9}, false, {});
        CHECK(r.rows.size() == 3 + 5);
    }
    CHECK_THROWS_AS(run_sweep(base, SweepAxis::spans, {}, false, {}), Error);
    CHECK_THROWS_AS(sweep_point(base, SweepAxis::spans, 1.5), Error);
    // even count: the band centre sits between two channels
    CHECK_THROWS_AS(sweep_point(ts::table1(8, 1), SweepAxis::bandwidth, 10e9), Error);
    CHECK_THROWS_AS(parse_sweep_axis("time"), Error);
}
