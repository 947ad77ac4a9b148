#pragma once

#include <vector>

#include "oband/isrs_profile.hpp"
#include "oband/system_model.hpp"

namespace oband {

// One exponential of the separated link-function integrand,
// coeff * e^{-alpha z}, and its Lorentzian stand-in kappa / (alpha_tilde - j phi).
struct LinkTerm {
    double coeff = 0.0;        // T_l
    double alpha = 0.0;        // 1/m
    double alpha_tilde = 0.0;  // 1/m
    double kappa = 0.0;
};

struct LinkFnTerms {
    std::vector<LinkTerm> terms;
    // Partial-fraction weights V_l = sum_l' T T' kappa kappa' / (at + at');
    // mu(phi) = 2 sum_l V_l at_l / (at_l^2 + phi^2).
    std::vector<double> weights;

    double alpha_tilde_min() const;
    // mu at phi = 0
    double peak() const;
};

// alpha~ such that (1 - e^{(-alpha + j phi) L}) / (alpha - j phi) is matched by
// kappa / (alpha~ - j phi) at phi = 0 in value and slope:
// alpha~ = alpha (1 - e^{-alpha L}) / (1 - e^{-alpha L} - alpha L e^{-alpha L}),
// kappa  = alpha~ (1 - e^{-alpha L}) / alpha.
// Throws Error(numeric) when alpha~ is not positive.
double equivalent_alpha_tilde(double alpha, double L);
double equivalent_kappa(double alpha, double alpha_tilde, double L);

LinkTerm make_link_term(double coeff, double alpha, double L);

// Terms of sqrt(rho_j rho_k rho_m / rho_i) for the (j, k, m) -> i triplet.
// Default indexing keeps two factors when m = i and three otherwise (with the
// COI treated as T_i = 1); as_printed swaps the two forms.
LinkFnTerms link_fn_terms(std::size_t j, std::size_t k, std::size_t m, std::size_t i,
                          const std::vector<ChannelFit>& fits, double L,
                          OmegaIndexing indexing = OmegaIndexing::appendix);

// Terms of rho_k itself, e^{-alpha z}(T' - T~' e^{-alpha~ z}), used by the
// SPM (k = i) and XPM regions.
LinkFnTerms link_fn_terms_single(const ChannelFit& fit, double L);

// Builds the weights from terms (called by the factories above).
void finalise(LinkFnTerms& t);

// sum_{l,l'} T T' kappa kappa' (at at' + phi^2) / ((at^2 + phi^2)(at'^2 + phi^2))
double link_fn_closed(const LinkFnTerms& t, double phi);
// |sum_l T kappa / (-at + j phi)|^2
double link_fn_closed_complex(const LinkFnTerms& t, double phi);
// Partial-fraction evaluation; same value, O(n).
double link_fn_fast(const LinkFnTerms& t, double phi);

// Exact z-integral |sum_l T (1 - e^{(-alpha + j phi) L}) / (alpha - j phi)|^2
// of the separated integrand (no Lorentzian approximation).
double link_fn_exact_terms(const LinkFnTerms& t, double phi, double L);

}  // namespace oband
