#pragma once

#include <complex>

namespace oband {

using cplx = std::complex<double>;

// F(x) = x atan(x) - ln(1 + x^2)/2, an antiderivative of atan.
double big_f(double x);

// atan(x) - atan(y) without cancellation for large, close arguments.
double atan_diff(double x, double y);

// Principal-branch E1(z), cut along the negative real axis.
// Throws Error(numeric) at z = 0.
cplx exp_integral_e1(cplx z);
// e^z E1(z); finite where E1 itself would overflow or underflow.
cplx exp_integral_e1_scaled(cplx z);

double sine_integral(double x);
// Small-argument surrogate Si(x) ~ atan(x) used by the published SPM term.
double sine_integral_atan(double x);

// Closed-form right-hand sides of the identities used by the closed-form model.
//
// int_0^x (ab + c^2 t^2) / ((a^2 + c^2 t^2)(b^2 + c^2 t^2)) dt
//     = (atan(cx/a) + atan(cx/b)) / (c (a + b))
double atan_rect_identity(double a, double b, double c, double x);

// int_{-x}^{x} atan(a + b t) dt = (F(a + bx) - F(a - bx)) / b
double atan_strip_integral(double a, double b, double x);

// int_0^x cos(t) / (a^2 + t^2) dt
//     = [e^a Im E1(a - jx) - e^-a Im E1(-a - jx) + sgn(a) sgn(x) pi e^-|a|] / (2a)
double cos_lorentz_integral(double a, double x);

// Same identity with the E1 pair replaced by its first-order asymptotic,
// 2a sin(x) / (a^2 + x^2).
double cos_lorentz_integral_asymptotic(double a, double x);

}  // namespace oband
