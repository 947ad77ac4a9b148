#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "oband/isrs_profile.hpp"
#include "oband/link_function.hpp"
#include "oband/phase_matching.hpp"
#include "oband/system_model.hpp"

namespace oband {

enum class OmegaSet { omega1, omega2 };  // omega1: f_m = f_i
enum class FwmPath { closed_form, quadrature_fallback };

struct Triplet {
    std::size_t j = 0, k = 0, m = 0;
    int tau = 1;
    OmegaSet set = OmegaSet::omega2;
};

struct TripletContribution {
    std::size_t j = 0, k = 0, m = 0, i = 0;
    int tau = 1;
    OmegaSet set = OmegaSet::omega2;
    TaylorPhase taylor;
    double eta = 0.0;  // single span, 1/W^2
    FwmPath path = FwmPath::closed_form;
};

// Pure-FWM triplets feeding channel i, j <= k, lexicographic in (j, k, m).
// tau = 2 when the mirrored (k, j, m) was folded in.
std::vector<Triplet> enumerate_triplets(const WdmGrid& grid, std::size_t i);

// int_{-Bj/2}^{Bj/2} df1 int_{-Bk/2}^{Bk/2} df2 mu(phi0 + phi1 f1 + phi2 f2)
// in closed form. Sets *cond to the worst cancellation ratio among the
// F-differences (large means digits were lost).
double fwm_rect_closed(const LinkFnTerms& terms, const TaylorPhase& tp, double Bj, double Bk,
                       double* cond = nullptr);
// Same integral with one axis done analytically and the other by adaptive
// Gauss-Kronrod; valid for any slopes including zero.
double fwm_rect_fallback(const LinkFnTerms& terms, const TaylorPhase& tp, double Bj, double Bk,
                         double rel_tol = 1e-10);

struct NliBreakdown {
    std::size_t channel = 0;
    double f_offset = 0.0;    // Hz
    double wavelength = 0.0;  // m
    double power = 0.0;       // W
    double bandwidth = 0.0;   // Hz
    int n_spans = 1;

    // Totals after n_spans, 1/W^2. *_inc is the incoherent part (N_s times
    // the first span for SPM/XPM), *_cc the coherent excess.
    double eta_spm_inc = 0.0, eta_spm_cc = 0.0;
    double eta_xpm_inc = 0.0, eta_xpm_cc = 0.0;
    double eta_fwm_inc = 0.0, eta_fwm_cc = 0.0;

    double epsilon_spm = 0.0, epsilon_xpm = 0.0, epsilon_fwm = 0.0, epsilon_total = 0.0;
    double snr_nli_db = 0.0;
    double snr_total_db = 0.0;
    bool has_snr_total = false;

    std::size_t n_triplets = 0;
    std::size_t n_fallback = 0;
    bool fit_fallback = false;

    double eta_spm() const { return eta_spm_inc + eta_spm_cc; }
    double eta_xpm() const { return eta_xpm_inc + eta_xpm_cc; }
    double eta_fwm() const { return eta_fwm_inc + eta_fwm_cc; }
    double eta_nli() const { return eta_spm() + eta_xpm() + eta_fwm(); }
    double eta_inc() const { return eta_spm_inc + eta_xpm_inc + eta_fwm_inc; }
    double eta_cc() const { return eta_spm_cc + eta_xpm_cc + eta_fwm_cc; }
};

// ln(1 + cc / inc) / ln(N); 0 for a single span or a zero coherent part.
double coherence_factor(double inc, double cc, int n_spans);

// Fills epsilons and SNR fields from the eta fields.
void finish_breakdown(NliBreakdown& b, const FibreSpec& fibre, const EngineSettings& settings);

class Engine {
public:
    explicit Engine(SystemModel model);
    // Reuses precomputed fits (one per channel).
    Engine(SystemModel model, std::vector<ChannelFit> fits);

    const SystemModel& model() const { return model_; }
    const BetaCoefficients& betas() const { return betas_; }
    const std::vector<ChannelFit>& fits() const { return fits_; }

    TripletContribution fwm_triplet(std::size_t i, const Triplet& t) const;
    // Single span sum over Omega in lexicographic order.
    double fwm_span(std::size_t i, std::vector<TripletContribution>* parts = nullptr) const;
    // Sum over spans of (P_{i,q}/P_i)^2 times the single-span value.
    double fwm_total(std::size_t i, std::vector<TripletContribution>* parts = nullptr) const;

    // Single-span incoherent SPM and XPM (the XPM sum over k != i).
    std::pair<double, double> spm_xpm_incoherent(std::size_t i) const;
    double spm_incoherent(std::size_t i) const;
    // Both strips (i,k) and (k,i) of interferer k.
    double xpm_incoherent(std::size_t i, std::size_t k) const;

    double spm_coherent(std::size_t i) const;
    double xpm_coherent(std::size_t i, std::size_t k) const;

    NliBreakdown evaluate(std::size_t i) const;
    // Channels in the given order (all when empty), using settings.threads
    // workers; results do not depend on the thread count.
    std::vector<NliBreakdown> evaluate_all(const std::vector<std::size_t>& channels = {}) const;

private:
    double strip_integral(std::size_t i, std::size_t k, const LinkFnTerms& terms) const;

    SystemModel model_;
    BetaCoefficients betas_;
    std::vector<ChannelFit> fits_;
};

}  // namespace oband
