#pragma once

#include "oband/system_model.hpp"

namespace oband {

// phi ~ phi0 + phi1 f1 + phi2 f2 about (f1, f2) = (f_j, f_k), with f1, f2
// local offsets inside the interacting channels.
struct TaylorPhase {
    double phi0 = 0.0;  // rad/m
    double phi1 = 0.0;  // rad/(m Hz)
    double phi2 = 0.0;  // rad/(m Hz)
};

// Phase mismatch of the (f1, f2, f1 + f2 - f_i) -> f_i interaction:
// -4 pi^2 (f1 - f_i)(f2 - f_i) [beta2 + pi beta3 (f1 + f2)
//     + (2 pi^2 / 3) beta4 ((f1-f_i)^2 + 3/2 (f1-f_i)(f2-f_i) + 3 (f1-f_i) f_i
//                           + (f2-f_i)^2 + 3 (f2-f_i) f_i + 3 f_i^2)]
double phi_exact(double f1, double f2, double f_i, const BetaCoefficients& b);

constexpr double kTripletTolerance = 1e-3;  // Hz

// Throws Error(numeric) when f_j + f_k - f_m != f_i beyond kTripletTolerance.
TaylorPhase taylor_phase(double f_j, double f_k, double f_m, double f_i, const BetaCoefficients& b);

// Mixed partial d^2 phi / df1 df2 at (f_i, f_i): phi(f_i+x, f_i+y, f_i) ~ phi_spm x y.
double phi_spm(double f_i, const BetaCoefficients& b);

// phi1 of the (i, k, k, i) triplet: phi(f_i+x, f_k, f_i) ~ phi_xpm x.
double phi_xpm(double f_i, double f_k, const BetaCoefficients& b);

// |sin(N phi L / 2) / sin(phi L / 2)|^2
double phased_array(double phi, double L, int n_spans);
// N + 2 sum_{n=1}^{N-1} (N - n) cos(n phi L)
double phased_array_sum(double phi, double L, int n_spans);

}  // namespace oband
