#pragma once

// Reference numerics for the tests. Deliberately independent of the library's
// quadrature so that a shared bug cannot hide.

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "oband/isrs_profile.hpp"
#include "oband/system_model.hpp"

namespace testing_support {

using ld = long double;

inline ld simpson_step(const std::function<ld(ld)>& f, ld a, ld b, ld fa, ld fm, ld fb, ld whole, ld tol,
                       int depth)
{
    const ld m = 0.5L * (a + b);
    const ld lm = 0.5L * (a + m), rm = 0.5L * (m + b);
    const ld flm = f(lm), frm = f(rm);
    const ld left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    const ld right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    const ld delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0L * tol) return left + right + delta / 15.0L;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5L * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5L * tol, depth - 1);
}

// Adaptive Simpson with Richardson correction, long double throughout.
inline ld simpson(const std::function<ld(ld)>& f, ld a, ld b, ld tol = 1e-14L, int depth = 48)
{
    // split into 16 panels first so narrow features are seen
    const int panels = 16;
    ld sum = 0.0L;
    for (int p = 0; p < panels; ++p) {
        const ld x0 = a + (b - a) * p / panels, x1 = a + (b - a) * (p + 1) / panels;
        const ld f0 = f(x0), f1 = f(x1), fm = f(0.5L * (x0 + x1));
        const ld whole = (x1 - x0) / 6.0L * (f0 + 4.0L * fm + f1);
        sum += simpson_step(f, x0, x1, f0, fm, f1, whole, tol / panels, depth);
    }
    return sum;
}

inline double rel_err(double got, double want)
{
    return std::fabs(got - want) / std::fabs(want);
}

// |int_0^L sqrt(rho_j rho_k rho_m / rho_i) e^{j phi z} dz|^2 with every profile
// in the first-order Taylor form. For m = i the ratio rho_m / rho_i cancels.
// full_i = false drops the Raman part of channel i (T~_i = 0) as the closed
// form does; true keeps the whole profile in the denominator.
inline ld link_z_quadrature(const oband::ChannelFit& j, const oband::ChannelFit& k, const oband::ChannelFit& m,
                            const oband::ChannelFit& i, bool m_is_i, double phi, double L, bool full_i = false,
                            ld tol = 1e-13L)
{
    auto amp = [&](ld z) -> ld {
        const double zd = static_cast<double>(z);
        ld a = static_cast<ld>(oband::sqrt_rho_taylor(zd, j)) * oband::sqrt_rho_taylor(zd, k);
        if (!m_is_i) {
            const ld den = full_i ? static_cast<ld>(oband::sqrt_rho_taylor(zd, i)) : std::exp(-0.5L * i.alpha * z);
            a *= oband::sqrt_rho_taylor(zd, m) / den;
        }
        return a;
    };
    const ld scale = L;
    const ld re = simpson([&](ld z) { return amp(z) * std::cos(phi * z); }, 0.0L, L, tol * scale);
    const ld im = simpson([&](ld z) { return amp(z) * std::sin(phi * z); }, 0.0L, L, tol * scale);
    return re * re + im * im;
}

inline std::string table1_json(int channels, int spans, double power_dbm = -2.0, double raman = 0.033)
{
    return R"({
  "fibre": {
    "span_length_km": 80, "gamma_per_w_km": 2.0, "raman_slope_per_w_km_thz": )" +
           std::to_string(raman) + R"(,
    "reference_wavelength_nm": 1302.3, "dispersion_ps_nm_km": 0.0,
    "slope_ps_nm2_km": 0.087, "curvature_ps_nm3_km": -9.714e-5,
    "attenuation_db_per_km": "default_oband"
  },
  "grid": {
    "n_spans": )" + std::to_string(spans) +
           R"(,
    "generator": { "count": )" + std::to_string(channels) +
           R"(, "spacing_hz": 100e9, "symbol_rate_hz": 96e9, "power_dbm_flat": )" + std::to_string(power_dbm) +
           R"( }
  },
  "engine": {}
})";
}

inline oband::SystemModel table1(int channels, int spans, double power_dbm = -2.0, double raman = 0.033)
{
    return oband::parse_config(table1_json(channels, spans, power_dbm, raman));
}

}  // namespace testing_support
