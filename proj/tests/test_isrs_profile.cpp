#include <cmath>
#include <vector>

#include "doctest.h"
#include "oband/isrs_profile.hpp"
#include "support.hpp"

using namespace oband;
namespace ts = testing_support;

namespace {

WdmGrid single_channel()
{
    WdmGrid g;
    g.channels.push_back({0.0, 96e9, 1e-3});
    return g;
}

}  // namespace

TEST_CASE("closed profile normalisation and Raman-free limit")
{
    const auto m = ts::table1(41, 1);
    for (std::size_t i : {0u, 20u, 40u}) CHECK(rho_closed(0.0, m.grid[i].f, m.grid, m.fibre) == 1.0);

    const auto off = ts::table1(41, 1, -2.0, 0.0);
    for (double z : {1e3, 20e3, 80e3}) {
        const double f = off.grid[3].f;
        CHECK(rho_closed(z, f, off.grid, off.fibre) == std::exp(-off.fibre.alpha(f) * z));
    }
}

TEST_CASE("closed profile tilt has the sign and size of the coupled power equations")
{
    const auto m = ts::table1(161, 1);
    const OdeProfile ode(m.grid, m.fibre, 4.0);
    const double L = m.fibre.span_length;
    for (std::size_t i : {0u, 160u}) {
        const double f = m.grid[i].f;
        const double base = std::exp(-m.fibre.alpha(f) * L);
        const double tilt_closed = std::log(rho_closed(L, f, m.grid, m.fibre) / base);
        const double tilt_ode = std::log(ode.rho(i, L) / base);
        // lowest frequency gains, highest loses
        CHECK(tilt_ode * (i == 0 ? 1.0 : -1.0) > 0.0);
        CHECK(tilt_closed * tilt_ode > 0.0);
        CHECK(std::fabs(tilt_closed - tilt_ode) < 0.1 * std::fabs(tilt_ode));
    }
}

TEST_CASE("Taylor square-root profile")
{
    auto fit = ChannelFit::from_parameters(1.5e12, 0.1, 7e-5, 6e-5, 3e-17);
    CHECK(sqrt_rho_taylor(0.0, fit) == 1.0);
    auto nocr = ChannelFit::from_parameters(1.5e12, 0.1, 7e-5, 6e-5, 0.0);
    auto centre = ChannelFit::from_parameters(0.0, 0.1, 7e-5, 6e-5, 3e-17);
    for (double z : {5e3, 40e3, 80e3}) {
        CHECK(sqrt_rho_taylor(z, nocr) == std::exp(-0.5 * 7e-5 * z));
        CHECK(sqrt_rho_taylor(z, centre) == std::exp(-0.5 * 7e-5 * z));
        // the separated form used by the link function
        CHECK(sqrt_rho_taylor(z, fit) ==
              doctest::Approx(std::exp(-0.5 * fit.alpha * z) * (fit.t - fit.t_tilde * std::exp(-fit.alpha_tilde * z)))
                  .epsilon(1e-13));
        CHECK(rho_taylor(z, fit) ==
              doctest::Approx(std::exp(-fit.alpha * z) *
                              (fit.t_prime - fit.t_tilde_prime * std::exp(-fit.alpha_tilde * z)))
                  .epsilon(1e-13));
    }
    CHECK(fit.t == 1.0 + fit.t_tilde);
    CHECK(fit.t_prime == 1.0 + fit.t_tilde_prime);
    CHECK(nocr.t == 1.0);
    CHECK(nocr.t_prime == 1.0);
    CHECK(nocr.t_tilde == 0.0);
    CHECK(nocr.t_tilde_prime == 0.0);
}

TEST_CASE("fit without Raman returns the physical loss and zero residual")
{
    const auto m = ts::table1(41, 1, -2.0, 0.0);
    for (std::size_t i : {0u, 20u, 40u}) {
        const auto fit = fit_channel(m.grid[i].f, m.grid, m.fibre, m.engine);
        CHECK(fit.alpha == m.fibre.alpha(m.grid[i].f));
        CHECK(fit.alpha_tilde == m.fibre.alpha(m.grid[i].f));
        CHECK(fit.cr == 0.0);
        CHECK(fit.residual_rms < 1e-15);
        CHECK_FALSE(fit.fallback);
    }
}

TEST_CASE("table-1 fit residuals at 0 dBm")
{
    const auto m = ts::table1(161, 1, 0.0);
    for (std::size_t i : {0u, 80u, 160u}) {
        const auto fit = fit_channel(m.grid[i].f, m.grid, m.fibre, m.engine);
        CHECK(fit.residual_rms < 2e-3);
        CHECK_FALSE(fit.fallback);
        CHECK(fit.alpha > 0.0);
        CHECK(fit.alpha_tilde > 0.0);
    }

    // At the Raman pivot the model is a bare exponential, so the best residual
    // is a one-parameter problem: golden-section search in long double.
    const std::size_t c = 80;
    const int n = m.engine.fit_samples;
    std::vector<ts::ld> z(n), t(n);
    for (int k = 0; k < n; ++k) {
        z[k] = static_cast<ts::ld>(m.fibre.span_length) * k / (n - 1);
        t[k] = std::sqrt(static_cast<ts::ld>(rho_closed(static_cast<double>(z[k]), m.grid[c].f, m.grid, m.fibre)));
    }
    auto cost = [&](ts::ld a) {
        ts::ld s = 0.0L;
        for (int k = 0; k < n; ++k) s += std::pow(std::exp(-0.5L * a * z[k]) - t[k], 2);
        return s / n;
    };
    ts::ld lo = 0.5L * m.fibre.alpha(0.0), hi = 2.0L * m.fibre.alpha(0.0);
    const ts::ld g = (std::sqrt(5.0L) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const ts::ld a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        (cost(a) < cost(b) ? hi : lo) = (cost(a) < cost(b) ? b : a);
    }
    const double best = static_cast<double>(std::sqrt(cost(0.5L * (lo + hi))));
    const auto fit = fit_channel(m.grid[c].f, m.grid, m.fibre, m.engine);
    CHECK(fit.residual_rms == doctest::Approx(best).epsilon(1e-6));
    // the stated 1e-3 bound is missed by under 0.1% at this operating point
    CHECK(best < 1.001e-3);
}

TEST_CASE("fitted Raman slope tends to the physical slope at low power")
{
    std::vector<double> cr;
    double physical = 0.0;
    for (double p : {-30.0, -20.0, -10.0}) {
        const auto m = ts::table1(161, 1, p);
        physical = m.fibre.raman_slope;
        cr.push_back(fit_channel(m.grid[0].f, m.grid, m.fibre, m.engine).cr);
    }
    // linear extrapolation in total power (dBm steps of 10 are factors of 10)
    const double p0 = 1e-6, p1 = 1e-5;
    const double extrapolated = cr[0] - (cr[1] - cr[0]) * p0 / (p1 - p0);
    CHECK(std::fabs(extrapolated - physical) < 0.05 * physical);
    CHECK(std::fabs(cr[0] - physical) < 0.05 * physical);
}

TEST_CASE("squared Taylor profile approaches the closed profile as power drops")
{
    double prev = 1e300;
    for (double p : {0.0, -10.0, -20.0, -30.0}) {
        const auto m = ts::table1(161, 1, p);
        const double f = m.grid[0].f;
        const auto fit = ChannelFit::from_parameters(f - m.grid.raman_centre(), m.grid.total_power(),
                                                     m.fibre.alpha(f), m.fibre.alpha(f), m.fibre.raman_slope);
        double gap = 0.0;
        for (int k = 0; k <= 64; ++k) {
            const double z = m.fibre.span_length * k / 64.0;
            const double r = rho_closed(z, f, m.grid, m.fibre);
            gap = std::max(gap, std::fabs(std::pow(sqrt_rho_taylor(z, fit), 2) - r) / r);
        }
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("closed profile decreases along the fibre for the highest channel")
{
    const auto m = ts::table1(161, 1, 2.0);
    const double f = m.grid[160].f;
    double prev = 2.0;
    for (int k = 0; k <= 200; ++k) {
        const double r = rho_closed(m.fibre.span_length * k / 200.0, f, m.grid, m.fibre);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("power equations: single channel and conservation")
{
    FibreSpec spec;
    spec.attenuation = AttenuationCurve::flat(5e-5);
    spec.raman_slope = 3.3e-17;
    const auto one = single_channel();
    const OdeProfile ode(one, spec, 4.0);
    for (double z : {0.0, 13e3, 80e3}) {
        CHECK(ode.rho(0, z) == doctest::Approx(std::exp(-5e-5 * z)).epsilon(1e-9));
        // the closed form spreads the channel over its bandwidth; the intra-channel tilt is tiny
        CHECK(rho_reference(z, 0.0, one, spec, ProfileMode::analytic) == doctest::Approx(std::exp(-5e-5 * z)).epsilon(1e-9));
    }

    WdmGrid two;
    two.channels = {{-1e12, 96e9, 0.05}, {1e12, 96e9, 0.05}};
    const OdeProfile pair(two, spec, 2.0);
    const double start = pair.power(0, 0.0) + pair.power(1, 0.0);
    for (std::size_t s = 0; s <= pair.steps(); ++s) {
        const double z = pair.step() * static_cast<double>(s);
        const double total = (pair.nodes(0)[s] + pair.nodes(1)[s]) * std::exp(5e-5 * z);
        CHECK(std::fabs(total - start) < 1e-6 * start);
    }
    CHECK(pair.power(0, 80e3) > pair.power(1, 80e3));

    auto m = ts::table1(41, 1);
    m.fibre.attenuation = AttenuationCurve::flat(7.7e-5);
    const OdeProfile wide(m.grid, m.fibre, 2.0);
    for (std::size_t s = 0; s <= wide.steps(); ++s) {
        const double z = wide.step() * static_cast<double>(s);
        double total = 0.0;
        for (std::size_t c = 0; c < m.grid.size(); ++c) total += wide.nodes(c)[s];
        CHECK(std::fabs(total * std::exp(7.7e-5 * z) - m.grid.total_power()) < 1e-6 * m.grid.total_power());
    }
}

TEST_CASE("analytic and ODE profiles agree on a 41-channel table-1 band")
{
    const auto m = ts::table1(41, 1);
    const OdeProfile ode(m.grid, m.fibre, 4.0);
    double worst = 0.0;
    for (std::size_t c = 0; c < m.grid.size(); ++c) {
        for (int k = 0; k <= 80; ++k) {
            const double z = 1e3 * k;
            const double a = rho_closed(z, m.grid[c].f, m.grid, m.fibre);
            worst = std::max(worst, std::fabs(ode.rho(c, z) - a) / a);
        }
    }
    CHECK(worst < 0.02);
}

TEST_CASE("ODE mode fit and determinism")
{
    auto m = ts::table1(41, 1);
    const auto a = fit_all(m.grid, m.fibre, m.engine);
    const auto b = fit_all(m.grid, m.fibre, m.engine);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].alpha == b[i].alpha);
        CHECK(a[i].alpha_tilde == b[i].alpha_tilde);
        CHECK(a[i].cr == b[i].cr);
        CHECK(a[i].residual_rms == b[i].residual_rms);
        const auto single = fit_channel(m.grid[i].f, m.grid, m.fibre, m.engine);
        CHECK(single.cr == a[i].cr);
    }
    m.engine.profile_mode = ProfileMode::ode;
    const auto o = fit_all(m.grid, m.fibre, m.engine);
    for (std::size_t i : {0u, 20u, 40u}) {
        CHECK(o[i].residual_rms < 1e-3);
        CHECK(o[i].alpha == doctest::Approx(a[i].alpha).epsilon(0.02));
    }
    CHECK_THROWS_AS(rho_reference(1e3, 5e13, m.grid, m.fibre, ProfileMode::ode), Error);
}
