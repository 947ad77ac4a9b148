#include "oband/phase_matching.hpp"

#include <cmath>
#include <sstream>

namespace oband {

namespace {
constexpr double k4Pi2 = 4.0 * kPi * kPi;
constexpr double k2Pi2over3 = 2.0 * kPi * kPi / 3.0;
}  // namespace

double phi_exact(double f1, double f2, double f_i, const BetaCoefficients& b)
{
    const double a = f1 - f_i;
    const double c = f2 - f_i;
    const double q = a * a + 1.5 * a * c + 3.0 * a * f_i + c * c + 3.0 * c * f_i + 3.0 * f_i * f_i;
    return -k4Pi2 * a * c * (b.beta2 + kPi * b.beta3 * (f1 + f2) + k2Pi2over3 * b.beta4 * q);
}

TaylorPhase taylor_phase(double f_j, double f_k, double f_m, double f_i, const BetaCoefficients& b)
{
    double miss = f_j + f_k - f_m - f_i;
    if (std::abs(miss) > kTripletTolerance) {
        std::ostringstream os;
        os << "triplet does not satisfy f_j + f_k - f_m = f_i (off by " << miss << " Hz)";
        throw Error(ErrorKind::numeric, os.str());
    }
    const double dj = f_j - f_i;
    const double dk = f_k - f_i;
    const double q0 = dj * dj + 1.5 * dj * dk + 3.0 * dj * f_i + dk * dk + 3.0 * dk * f_i + 3.0 * f_i * f_i;
    const double q1 = 2.0 * dj + 1.5 * dk + 3.0 * f_i;
    const double q2 = 2.0 * dk + 1.5 * dj + 3.0 * f_i;
    TaylorPhase t;
    t.phi0 = -k4Pi2 * dj * dk * (b.beta2 + kPi * b.beta3 * (f_j + f_k) + k2Pi2over3 * b.beta4 * q0);
    t.phi1 = -k4Pi2 * dk * (b.beta2 + kPi * b.beta3 * (f_j + f_k + dj) + k2Pi2over3 * b.beta4 * (q0 + dj * q1));
    t.phi2 = -k4Pi2 * dj * (b.beta2 + kPi * b.beta3 * (f_j + f_k + dk) + k2Pi2over3 * b.beta4 * (q0 + dk * q2));
    return t;
}

double phi_spm(double f_i, const BetaCoefficients& b)
{
    return -k4Pi2 * (b.beta2 + 2.0 * kPi * b.beta3 * f_i + 2.0 * kPi * kPi * b.beta4 * f_i * f_i);
}

double phi_xpm(double f_i, double f_k, const BetaCoefficients& b)
{
    if (f_k == f_i) throw Error(ErrorKind::numeric, "phi_xpm needs f_k != f_i");
    const double dk = f_k - f_i;
    return -k4Pi2 * dk *
           (b.beta2 + kPi * b.beta3 * (f_i + f_k) + k2Pi2over3 * b.beta4 * (dk * dk + 3.0 * dk * f_i + 3.0 * f_i * f_i));
}

double phased_array(double phi, double L, int n_spans)
{
    if (n_spans <= 1) return 1.0;
    const double n = static_cast<double>(n_spans);
    const double half = 0.5 * phi * L;
    const double den = std::sin(half);
    if (std::abs(den) < 1e-12) return n * n;
    const double r = std::sin(n * half) / den;
    return r * r;
}

double phased_array_sum(double phi, double L, int n_spans)
{
    double s = static_cast<double>(n_spans);
    for (int n = 1; n < n_spans; ++n) s += 2.0 * (n_spans - n) * std::cos(n * phi * L);
    return s;
}

}  // namespace oband
