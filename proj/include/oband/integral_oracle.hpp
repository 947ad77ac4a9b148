#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "oband/cf_engine.hpp"
#include "oband/system_model.hpp"

namespace oband {

// int_0^L A(z) e^{j phi z} dz for A sampled at n + 1 uniform nodes.
// A is treated as e^{-abar z} times a piecewise-linear function, with
// abar = ln(A_0 / A_n) / L, and that interpolant is integrated exactly, so
// the rule stays accurate when phi h is large.
std::complex<double> z_integral(const std::vector<double>& A, double L, double phi);

// Same integral by the composite trapezoid rule on the complex integrand.
std::complex<double> z_integral_trapezoid(const std::vector<double>& A, double L, double phi);

// Sums over the cells of one region of G G G mu and G G G mu chi, already
// multiplied by the eta prefactor (1/W^2).
struct RegionSums {
    double mu = 0.0;
    double mu_chi = 0.0;
    double cells = 0.0;
};

struct OracleChannelResult {
    NliBreakdown breakdown;
    RegionSums spm, xpm, fwm;
};

class IntegralOracle {
public:
    explicit IntegralOracle(SystemModel model);

    const SystemModel& model() const { return model_; }
    std::size_t z_steps() const { return nz_; }

    // Link function of (f1, f2, f1 + f2 - f_i) -> f_i on the oracle z grid.
    // Analytic profiles use the exact frequencies; ODE profiles use the
    // channels the frequencies fall in.
    double mu(double f1, double f2, double f_i) const;

    // Cell count of a run over the given channels (all when empty).
    double cell_count(const std::vector<std::size_t>& channels = {}) const;

    OracleChannelResult evaluate(std::size_t i) const;
    // Throws Error(budget) when the run exceeds oracle.max_cells.
    std::vector<OracleChannelResult> evaluate_all(const std::vector<std::size_t>& channels = {}) const;

private:
    double rho_at(double f, double z) const;

    SystemModel model_;
    BetaCoefficients betas_;
    std::size_t nz_ = 0;
    double h_ = 0.0;
    std::vector<std::vector<double>> sqrt_rho_;  // [channel][node] at channel centres
    std::shared_ptr<const OdeProfile> ode_;
};

}  // namespace oband
