#pragma once

#include <vector>

#include "oband/system_model.hpp"

namespace oband {

struct ChannelFit {
    double f_raman = 0.0;  // offset from the Raman pivot, Hz
    double p_tot = 0.0;    // W
    double alpha = 0.0;        // 1/m
    double alpha_tilde = 0.0;  // 1/m
    double cr = 0.0;           // 1/(W m Hz)
    double t_tilde = 0.0;
    double t = 1.0;
    double t_tilde_prime = 0.0;
    double t_prime = 1.0;
    double residual_rms = 0.0;
    bool fallback = false;

    static ChannelFit from_parameters(double f_raman, double p_tot, double alpha, double alpha_tilde,
                                      double cr);
};

// Power-weighted mean loss of the launched channels; drives the decay of the
// total power and so the Raman exchange.
double mean_attenuation(const WdmGrid& grid, const FibreSpec& spec);

// rho(z, f) = B_tot x e^{-x f} / (2 sinh(B_tot x / 2)) e^{-alpha(f) z},
// x = P_tot C_r L_eff(z) with L_eff taken at the mean loss, f measured from
// the Raman pivot.
double rho_closed(double z, double f_i, const WdmGrid& grid, const FibreSpec& spec);

// e^{-alpha z/2} (1 - P_tot C f L_eff(z) / 2) = e^{-alpha z/2} (T - T~ e^{-alpha~ z})
double sqrt_rho_taylor(double z, const ChannelFit& fit);
// First-order form of rho itself: e^{-alpha z} (T' - T~' e^{-alpha~ z})
double rho_taylor(double z, const ChannelFit& fit);

// Coupled per-channel power equations with triangular Raman gain,
// dP_n/dz = -alpha_n P_n + sum_m C_r (f_m - f_n) P_m P_n, fixed-step RK4.
class OdeProfile {
public:
    OdeProfile(const WdmGrid& grid, const FibreSpec& spec, double steps_per_km = 4.0);

    double power(std::size_t channel, double z) const;
    double rho(std::size_t channel, double z) const;
    std::size_t steps() const { return steps_; }
    double step() const { return h_; }
    const std::vector<double>& nodes(std::size_t channel) const { return p_[channel]; }

private:
    std::vector<double> rhs(const std::vector<double>& p) const;

    std::vector<double> f_;
    std::vector<double> alpha_;
    double cr_;
    double h_;
    std::size_t steps_;
    std::vector<std::vector<double>> p_;   // [channel][node]
    std::vector<std::vector<double>> dp_;  // derivatives at nodes
};

// Reference profile for fitting; ODE mode needs f_i to fall in a channel.
double rho_reference(double z, double f_i, const WdmGrid& grid, const FibreSpec& spec,
                     ProfileMode mode, double ode_steps_per_km = 4.0);

// Least-squares fit of sqrt_rho_taylor to sqrt(rho_reference) on a uniform z
// grid. Falls back to physical parameters (fallback = true) when the fit is
// poor.
ChannelFit fit_channel(double f_i, const WdmGrid& grid, const FibreSpec& spec,
                       const EngineSettings& settings);
std::vector<ChannelFit> fit_all(const WdmGrid& grid, const FibreSpec& spec,
                                const EngineSettings& settings);

}  // namespace oband
