#pragma once

// Independent references shared by the unit tests and the acceptance run.

#include <complex>

#include "oband/link_function.hpp"
#include "oband/phase_matching.hpp"
#include "oband/system_model.hpp"
#include "support.hpp"

namespace testing_support {

// beta1(omega) relative to its value at omega_c, from D(lambda) integrated
// numerically over wavelength (Gauss-Legendre, 12 points; exact for the
// quadratic dispersion model but written as a quadrature on purpose).
inline ld beta1_rel(ld omega, ld lc, ld D, ld S, ld Sd)
{
    static const ld x[6] = {0.1252334085114689154724414L, 0.3678314989981801937526915L,
                            0.5873179542866174472967024L, 0.7699026741943046870368938L,
                            0.9041172563704748566784659L, 0.9815606342467192506905491L};
    static const ld w[6] = {0.2491470458134027850005624L, 0.2334925365383548087608499L,
                            0.2031674267230659217490645L, 0.1600783285433462263346525L,
                            0.1069393259953184309602547L, 0.0471753363865118271946160L};
    const ld c = oband::kSpeedOfLight;
    const ld lam = 2.0L * 3.14159265358979323846264338L * c / omega;
    const ld mid = 0.5L * (lam + lc), half = 0.5L * (lam - lc);
    auto d = [&](ld l) {
        const ld dl = l - lc;
        return D + S * dl + 0.5L * Sd * dl * dl;
    };
    ld s = 0.0L;
    for (int q = 0; q < 6; ++q) s += w[q] * (d(mid + half * x[q]) + d(mid - half * x[q]));
    return half * s;
}

// n-th derivative by central differences at step h and h/2 with one
// Richardson step.
template <class F>
ld central(const F& g, ld x, ld h, int n)
{
    auto diff = [&](ld s) -> ld {
        switch (n) {
        case 1: return (g(x + s) - g(x - s)) / (2 * s);
        case 2: return (g(x + s) - 2 * g(x) + g(x - s)) / (s * s);
        default: return (g(x + 2 * s) - 2 * g(x + s) + 2 * g(x - s) - g(x - 2 * s)) / (2 * s * s * s);
        }
    };
    return (4 * diff(0.5L * h) - diff(h)) / 3;
}

struct OracleBetas {
    double b2, b3, b4;
};

inline OracleBetas finite_difference_betas(const oband::FibreSpec& f)
{
    const ld lc = f.reference_wavelength;
    const ld wc = 2.0L * 3.14159265358979323846264338L * oband::kSpeedOfLight / lc;
    auto g = [&](ld w) { return beta1_rel(w, lc, f.dispersion_D, f.dispersion_S, f.dispersion_Sdot); };
    const ld h = wc * 2e-4L;
    return {static_cast<double>(central(g, wc, h, 1)), static_cast<double>(central(g, wc, h, 2)),
            static_cast<double>(central(g, wc, h, 3))};
}

// |sum_l T kappa / (-at + j phi)|^2 written out here rather than taken from
// the library.
inline double mu_lorentz(const oband::LinkFnTerms& t, double phi)
{
    std::complex<double> s = 0.0;
    for (const auto& a : t.terms) s += a.coeff * a.kappa / std::complex<double>(-a.alpha_tilde, phi);
    return std::norm(s);
}

inline double riemann_rect(const oband::LinkFnTerms& t, const oband::TaylorPhase& tp, double Bj, double Bk, int n)
{
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
        const double f1 = -0.5 * Bj + (a + 0.5) * Bj / n;
        for (int b = 0; b < n; ++b) {
            const double f2 = -0.5 * Bk + (b + 0.5) * Bk / n;
            s += mu_lorentz(t, tp.phi0 + tp.phi1 * f1 + tp.phi2 * f2);
        }
    }
    return s * (Bj / n) * (Bk / n);
}

}  // namespace testing_support
