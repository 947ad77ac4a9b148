#include "oband/link_function.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "oband/special_functions.hpp"

namespace oband {

double equivalent_alpha_tilde(double alpha, double L)
{
    const double x = alpha * L;
    double r;  // alpha~ L
    if (std::abs(x) < 1e-3) {
        r = 2.0 + x / 3.0 + x * x / 18.0 + x * x * x / 270.0;
    } else {
        const double e1 = -std::expm1(-x);  // 1 - e^{-x}
        const double den = e1 - x * (1.0 - e1);
        r = x * e1 / den;
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
        std::ostringstream os;
        os << "equivalent loss is not positive for alpha L = " << x;
        throw Error(ErrorKind::numeric, os.str());
    }
    return r / L;
}

double equivalent_kappa(double alpha, double alpha_tilde, double L)
{
    const double x = alpha * L;
    double s;  // (1 - e^{-x}) / x
    if (std::abs(x) < 1e-4)
        s = 1.0 - x / 2.0 + x * x / 6.0;
    else
        s = -std::expm1(-x) / x;
    return alpha_tilde * L * s;
}

LinkTerm make_link_term(double coeff, double alpha, double L)
{
    LinkTerm t;
    t.coeff = coeff;
    t.alpha = alpha;
    t.alpha_tilde = equivalent_alpha_tilde(alpha, L);
    t.kappa = equivalent_kappa(alpha, t.alpha_tilde, L);
    return t;
}

double LinkFnTerms::alpha_tilde_min() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) m = std::min(m, t.alpha_tilde);
    return m;
}

double LinkFnTerms::peak() const
{
    double s = 0.0;
    for (const auto& t : terms) s += t.coeff * t.kappa / t.alpha_tilde;
    return s * s;
}

void finalise(LinkFnTerms& t)
{
    const std::size_t n = t.terms.size();
    t.weights.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        const auto& p = t.terms[a];
        double v = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const auto& q = t.terms[b];
            v += p.coeff * q.coeff * p.kappa * q.kappa / (p.alpha_tilde + q.alpha_tilde);
        }
        t.weights[a] = v;
    }
}

namespace {

// Per-channel factor of sqrt(rho): T - T~ e^{-alpha~ z} -> coefficients of
// the l = 0 and l = 1 exponentials.
struct Factor {
    double c[2];
    double at;
};

Factor sqrt_factor(const ChannelFit& f) { return {{f.t, -f.t_tilde}, f.alpha_tilde}; }

LinkFnTerms expand(const std::vector<Factor>& fs, double base_alpha, double L)
{
    LinkFnTerms out;
    const std::size_t n = fs.size();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double coeff = 1.0;
        double alpha = base_alpha;
        for (std::size_t q = 0; q < n; ++q) {
            const unsigned l = (mask >> (n - 1 - q)) & 1u;
            coeff *= fs[q].c[l];
            if (l) alpha += fs[q].at;
        }
        if (coeff == 0.0) continue;
        out.terms.push_back(make_link_term(coeff, alpha, L));
    }
    if (out.terms.empty()) out.terms.push_back(make_link_term(0.0, base_alpha, L));
    finalise(out);
    return out;
}

}  // namespace

LinkFnTerms link_fn_terms(std::size_t j, std::size_t k, std::size_t m, std::size_t i,
                          const std::vector<ChannelFit>& fits, double L, OmegaIndexing indexing)
{
    const bool omega1 = (m == i);
    const bool three = (indexing == OmegaIndexing::appendix) ? !omega1 : omega1;
    std::vector<Factor> fs{sqrt_factor(fits[j]), sqrt_factor(fits[k])};
    double base = 0.5 * (fits[j].alpha + fits[k].alpha);
    if (three) {
        fs.push_back(sqrt_factor(fits[m]));
        base += 0.5 * (fits[m].alpha - fits[i].alpha);
    }
    return expand(fs, base, L);
}

LinkFnTerms link_fn_terms_single(const ChannelFit& fit, double L)
{
    Factor f{{fit.t_prime, -fit.t_tilde_prime}, fit.alpha_tilde};
    return expand({f}, fit.alpha, L);
}

double link_fn_closed(const LinkFnTerms& t, double phi)
{
    const double p2 = phi * phi;
    double s = 0.0;
    for (const auto& a : t.terms) {
        for (const auto& b : t.terms) {
            s += a.coeff * b.coeff * a.kappa * b.kappa * (a.alpha_tilde * b.alpha_tilde + p2) /
                 ((a.alpha_tilde * a.alpha_tilde + p2) * (b.alpha_tilde * b.alpha_tilde + p2));
        }
    }
    return s;
}

double link_fn_closed_complex(const LinkFnTerms& t, double phi)
{
    cplx s = 0.0;
    for (const auto& a : t.terms) s += a.coeff * a.kappa / cplx(-a.alpha_tilde, phi);
    return std::norm(s);
}

double link_fn_fast(const LinkFnTerms& t, double phi)
{
    const double p2 = phi * phi;
    double s = 0.0;
    for (std::size_t q = 0; q < t.terms.size(); ++q) {
        const double a = t.terms[q].alpha_tilde;
        s += t.weights[q] * a / (a * a + p2);
    }
    return 2.0 * s;
}

double link_fn_exact_terms(const LinkFnTerms& t, double phi, double L)
{
    cplx s = 0.0;
    for (const auto& a : t.terms) {
        const cplx w(-a.alpha, phi);
        s += a.coeff * (std::exp(w * L) - 1.0) / w;
    }
    return std::norm(s);
}

}  // namespace oband
