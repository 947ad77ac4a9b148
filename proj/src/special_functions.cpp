#include "oband/special_functions.hpp"

#include <cmath>
#include <limits>

#include "oband/system_model.hpp"

namespace oband {

namespace {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

using lcplx = std::complex<long double>;

// E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
lcplx e1_series(lcplx z)
{
    lcplx term = 1.0L;
    lcplx sum = 0.0L;
    const long double az = std::abs(z);
    for (int k = 1; k < 100000; ++k) {
        term *= -z / static_cast<long double>(k);
        lcplx add = term / static_cast<long double>(k);
        sum += add;
        if (k > az && std::abs(add) <= 1e-21L * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(z) - sum;
}

// e^z E1(z) by the even contraction 1/(z+1- 1/(z+3- 4/(z+5- ...))), modified
// Lentz. Converges off the negative real axis, slowly close to it.
cplx e1_scaled_cf(cplx z)
{
    const double tiny = 1e-300;
    cplx b = z + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 50000; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw Error(ErrorKind::numeric, "E1 continued fraction did not converge");
}

bool use_series(cplx z)
{
    double az = std::abs(z);
    if (az <= 4.0) return true;
    return z.real() < 0.0 && std::abs(z.imag()) < 2.0 && az < 60.0;
}

}  // namespace

double big_f(double x)
{
    double ax = std::abs(x);
    if (ax > 1e150) return ax * (0.5 * kPi) - std::log(ax) - 1.0;
    return x * std::atan(x) - 0.5 * std::log1p(x * x);
}

double atan_diff(double x, double y)
{
    // arg((1 + jx)(1 - jy)) stays inside (-pi, pi)
    return std::atan2(x - y, 1.0 + x * y);
}

cplx exp_integral_e1(cplx z)
{
    if (z == cplx(0.0, 0.0)) throw Error(ErrorKind::numeric, "E1 undefined at z = 0");
    if (use_series(z)) {
        lcplx r = e1_series(lcplx(z.real(), z.imag()));
        return cplx(static_cast<double>(r.real()), static_cast<double>(r.imag()));
    }
    return std::exp(-z) * e1_scaled_cf(z);
}

cplx exp_integral_e1_scaled(cplx z)
{
    if (z == cplx(0.0, 0.0)) throw Error(ErrorKind::numeric, "E1 undefined at z = 0");
    if (use_series(z)) {
        lcplx zl(z.real(), z.imag());
        lcplx r = std::exp(zl) * e1_series(zl);
        return cplx(static_cast<double>(r.real()), static_cast<double>(r.imag()));
    }
    return e1_scaled_cf(z);
}

double sine_integral(double x)
{
    if (x < 0.0) return -sine_integral(-x);
    if (x == 0.0) return 0.0;
    if (x <= 4.0) {
        // sum (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
        long double xl = x, term = xl, sum = xl;
        for (int k = 1; k < 60; ++k) {
            term *= -xl * xl / ((2.0L * k) * (2.0L * k + 1.0L));
            long double add = term / (2.0L * k + 1.0L);
            sum += add;
            if (std::abs(add) < 1e-21L * std::abs(sum)) break;
        }
        return static_cast<double>(sum);
    }
    // E1(jx) = -Ci(x) + j(Si(x) - pi/2)
    return 0.5 * kPi + exp_integral_e1(cplx(0.0, x)).imag();
}

double sine_integral_atan(double x) { return std::atan(x); }

double atan_rect_identity(double a, double b, double c, double x)
{
    if (c == 0.0) throw Error(ErrorKind::numeric, "atan_rect_identity requires c != 0");
    if (a + b == 0.0) throw Error(ErrorKind::numeric, "atan_rect_identity requires a + b != 0");
    return (std::atan(c * x / a) + std::atan(c * x / b)) / (c * (a + b));
}

double atan_strip_integral(double a, double b, double x)
{
    if (b == 0.0) throw Error(ErrorKind::numeric, "atan_strip_integral requires b != 0");
    return (big_f(a + b * x) - big_f(a - b * x)) / b;
}

double cos_lorentz_integral(double a, double x)
{
    if (a == 0.0) throw Error(ErrorKind::numeric, "cos_lorentz_integral requires a != 0");
    if (x == 0.0) return 0.0;
    // e^{a} E1(a - jx) = e^{jx} S(a - jx), e^{-a} E1(-a - jx) = e^{jx} S(-a - jx)
    cplx ejx(std::cos(x), std::sin(x));
    cplx s1 = exp_integral_e1_scaled(cplx(a, -x));
    cplx s2 = exp_integral_e1_scaled(cplx(-a, -x));
    double branch = (a > 0 ? 1.0 : -1.0) * (x > 0 ? 1.0 : -1.0) * kPi * std::exp(-std::abs(a));
    return ((ejx * s1).imag() - (ejx * s2).imag() + branch) / (2.0 * a);
}

double cos_lorentz_integral_asymptotic(double a, double x)
{
    if (a == 0.0) throw Error(ErrorKind::numeric, "cos_lorentz_integral requires a != 0");
    if (x == 0.0) return 0.0;
    double branch = (a > 0 ? 1.0 : -1.0) * (x > 0 ? 1.0 : -1.0) * kPi * std::exp(-std::abs(a));
    return (2.0 * a * std::sin(x) / (a * a + x * x) + branch) / (2.0 * a);
}

}  // namespace oband
