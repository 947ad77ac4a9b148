#include "oband/isrs_profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>

#include "oband/log.hpp"

namespace oband {

namespace {

double l_eff(double z, double a)
{
    if (a * z < 1e-8) return z * (1.0 - 0.5 * a * z);
    return -std::expm1(-a * z) / a;
}

}  // namespace

ChannelFit ChannelFit::from_parameters(double f_raman, double p_tot, double alpha, double alpha_tilde,
                                       double cr)
{
    ChannelFit c;
    c.f_raman = f_raman;
    c.p_tot = p_tot;
    c.alpha = alpha;
    c.alpha_tilde = alpha_tilde;
    c.cr = cr;
    c.t_tilde = -(p_tot * cr / (2.0 * alpha_tilde)) * f_raman;
    c.t = 1.0 + c.t_tilde;
    c.t_tilde_prime = -(p_tot * cr / alpha_tilde) * f_raman;
    c.t_prime = 1.0 + c.t_tilde_prime;
    return c;
}

double mean_attenuation(const WdmGrid& grid, const FibreSpec& spec)
{
    double p = 0.0, pa = 0.0;
    for (const auto& c : grid.channels) {
        p += c.P;
        pa += c.P * spec.alpha(c.f);
    }
    return p > 0.0 ? pa / p : spec.alpha(grid.raman_centre());
}

double rho_closed(double z, double f_i, const WdmGrid& grid, const FibreSpec& spec)
{
    const double a = spec.alpha(f_i);
    const double x = grid.total_power() * spec.raman_slope * l_eff(z, mean_attenuation(grid, spec));
    const double s = 0.5 * grid.total_bandwidth() * x;
    double ratio;
    if (std::abs(s) < 1e-6)
        ratio = 1.0 - s * s / 6.0;
    else
        ratio = s / std::sinh(s);
    return ratio * std::exp(-x * (f_i - grid.raman_centre()) - a * z);
}

double sqrt_rho_taylor(double z, const ChannelFit& fit)
{
    return std::exp(-0.5 * fit.alpha * z) *
           (1.0 - 0.5 * fit.p_tot * fit.cr * fit.f_raman * l_eff(z, fit.alpha_tilde));
}

double rho_taylor(double z, const ChannelFit& fit)
{
    return std::exp(-fit.alpha * z) * (1.0 - fit.p_tot * fit.cr * fit.f_raman * l_eff(z, fit.alpha_tilde));
}

OdeProfile::OdeProfile(const WdmGrid& grid, const FibreSpec& spec, double steps_per_km)
    : cr_(spec.raman_slope)
{
    const std::size_t n = grid.size();
    for (const auto& c : grid.channels) {
        f_.push_back(c.f);
        alpha_.push_back(spec.alpha(c.f));
    }
    steps_ = static_cast<std::size_t>(std::ceil(spec.span_length / 1e3 * steps_per_km));
    steps_ = std::max<std::size_t>(steps_, 1);
    h_ = spec.span_length / static_cast<double>(steps_);
    p_.assign(n, std::vector<double>(steps_ + 1));
    dp_.assign(n, std::vector<double>(steps_ + 1));

    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = grid[k].P;
    auto store = [&](std::size_t node, const std::vector<double>& v) {
        auto d = rhs(v);
        for (std::size_t k = 0; k < n; ++k) {
            p_[k][node] = v[k];
            dp_[k][node] = d[k];
        }
    };
    store(0, p);
    std::vector<double> tmp(n);
    for (std::size_t s = 0; s < steps_; ++s) {
        auto k1 = rhs(p);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = p[k] + 0.5 * h_ * k1[k];
        auto k2 = rhs(tmp);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = p[k] + 0.5 * h_ * k2[k];
        auto k3 = rhs(tmp);
        for (std::size_t k = 0; k < n; ++k) tmp[k] = p[k] + h_ * k3[k];
        auto k4 = rhs(tmp);
        for (std::size_t k = 0; k < n; ++k) {
            p[k] += h_ / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            if (!(p[k] > 0.0)) {
                std::ostringstream os;
                os << "ISRS power equations became unstable (channel " << k + 1 << " at z = "
                   << (s + 1) * h_ << " m)";
                throw Error(ErrorKind::numeric, os.str());
            }
        }
        store(s + 1, p);
    }
}

std::vector<double> OdeProfile::rhs(const std::vector<double>& p) const
{
    const std::size_t n = p.size();
    // sum_m C (f_m - f_n) P_m = C (sum_m f_m P_m - f_n sum_m P_m)
    double sp = 0.0, sfp = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        sp += p[m];
        sfp += f_[m] * p[m];
    }
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = -alpha_[k] * p[k] + cr_ * (sfp - f_[k] * sp) * p[k];
    return d;
}

double OdeProfile::power(std::size_t channel, double z) const
{
    const auto& p = p_[channel];
    const auto& d = dp_[channel];
    double u = std::clamp(z / h_, 0.0, static_cast<double>(steps_));
    std::size_t s = std::min(static_cast<std::size_t>(u), steps_ - 1);
    double t = u - static_cast<double>(s);
    // cubic Hermite between nodes
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * p[s] + h10 * h_ * d[s] + h01 * p[s + 1] + h11 * h_ * d[s + 1];
}

double OdeProfile::rho(std::size_t channel, double z) const { return power(channel, z) / p_[channel][0]; }

double rho_reference(double z, double f_i, const WdmGrid& grid, const FibreSpec& spec, ProfileMode mode,
                     double ode_steps_per_km)
{
    if (mode == ProfileMode::analytic) return rho_closed(z, f_i, grid, spec);
    int ch = grid.find_channel(f_i);
    if (ch < 0) throw Error(ErrorKind::numeric, "ODE reference profile needs a frequency inside a channel");
    OdeProfile ode(grid, spec, ode_steps_per_km);
    return ode.rho(static_cast<std::size_t>(ch), z);
}

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

bool solve3(Mat3 a, Vec3 b, Vec3& x)
{
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-300) return false;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < 3; ++r) {
            double m = a[r][c] / a[c][c];
            for (int k = c; k < 3; ++k) a[r][k] -= m * a[c][k];
            b[r] -= m * b[c];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < 3; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return true;
}

// Projected Levenberg-Marquardt over normalised (alpha, alpha~, C) with
// analytic Jacobian. Deterministic for fixed input.
ChannelFit fit_profile(double f_raman, double p_tot, double alpha0, double cr0,
                       const std::vector<double>& z, const std::vector<double>& target)
{
    const std::size_t n = z.size();
    const Vec3 scale{alpha0, alpha0, cr0};
    const Vec3 lo{0.5, 0.5, 0.0}, hi{2.0, 2.0, 4.0};
    const double pf = p_tot * f_raman;

    auto model = [&](const Vec3& q, std::vector<double>* r, std::vector<Vec3>* jac) {
        const double a = q[0] * scale[0], b = q[1] * scale[1], c = q[2] * scale[2];
        double cost = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double ea = std::exp(-0.5 * a * z[k]);
            const double le = l_eff(z[k], b);
            const double g = ea * (1.0 - 0.5 * pf * c * le);
            const double res = g - target[k];
            cost += res * res;
            if (r) (*r)[k] = res;
            if (jac) {
                const double eb = std::exp(-b * z[k]);
                const double dle = z[k] * eb / b - le / b;  // d L_eff / d alpha~
                (*jac)[k] = {-0.5 * z[k] * g * scale[0], -ea * 0.5 * pf * c * dle * scale[1],
                             -ea * 0.5 * pf * le * scale[2]};
            }
        }
        return cost;
    };

    Vec3 q{1.0, 1.0, 1.0};
    std::vector<double> r(n);
    std::vector<Vec3> jac(n);
    double cost = model(q, &r, &jac);
    double lambda = 1e-3;
    bool done = false;
    for (int iter = 0; iter < 300 && !done; ++iter) {
        Mat3 jtj{};
        Vec3 jtr{};
        for (std::size_t k = 0; k < n; ++k)
            for (int i = 0; i < 3; ++i) {
                jtr[i] += jac[k][i] * r[k];
                for (int j = 0; j < 3; ++j) jtj[i][j] += jac[k][i] * jac[k][j];
            }
        bool improved = false;
        for (int tries = 0; tries < 20 && !improved; ++tries) {
            Mat3 a = jtj;
            for (int i = 0; i < 3; ++i) a[i][i] += lambda * std::max(jtj[i][i], 1e-30);
            Vec3 step{};
            Vec3 neg{-jtr[0], -jtr[1], -jtr[2]};
            if (!solve3(a, neg, step)) {
                lambda *= 10.0;
                continue;
            }
            Vec3 trial;
            for (int i = 0; i < 3; ++i) trial[i] = std::clamp(q[i] + step[i], lo[i], hi[i]);
            double c2 = model(trial, nullptr, nullptr);
            if (c2 < cost) {
                double rel = (cost - c2) / std::max(cost, 1e-300);
                q = trial;
                cost = model(q, &r, &jac);
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                done = rel < 1e-13;
            } else {
                lambda *= 4.0;
            }
        }
        if (!improved) break;
    }
    ChannelFit fit = ChannelFit::from_parameters(f_raman, p_tot, q[0] * scale[0], q[1] * scale[1], q[2] * scale[2]);
    fit.residual_rms = std::sqrt(cost / static_cast<double>(n));
    return fit;
}

ChannelFit fit_from_samples(double f_i, const WdmGrid& grid, const FibreSpec& spec,
                            const EngineSettings& settings, const std::vector<double>& z,
                            const std::vector<double>& target)
{
    const double f_raman = f_i - grid.raman_centre();
    const double p_tot = grid.total_power();
    const double a0 = spec.alpha(f_i);
    const double cr0 = spec.raman_slope;
    ChannelFit physical = ChannelFit::from_parameters(f_raman, p_tot, a0, a0, cr0);

    auto rms_of = [&](const ChannelFit& fit) {
        double s = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            double d = sqrt_rho_taylor(z[k], fit) - target[k];
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(z.size()));
    };

    if (cr0 == 0.0 || p_tot == 0.0) {
        physical.residual_rms = rms_of(physical);
        return physical;
    }
    ChannelFit fit = fit_profile(f_raman, p_tot, a0, cr0, z, target);
    if (!(fit.residual_rms <= settings.fit_fallback_rms) || !std::isfinite(fit.residual_rms)) {
        std::ostringstream os;
        os << "ISRS fit at offset " << f_i << " Hz left residual " << fit.residual_rms
           << "; using physical parameters";
        log(LogLevel::warn, os.str());
        physical.residual_rms = rms_of(physical);
        physical.fallback = true;
        return physical;
    }
    return fit;
}

std::vector<double> z_samples(const FibreSpec& spec, int count)
{
    std::vector<double> z(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) z[static_cast<std::size_t>(k)] = spec.span_length * k / (count - 1);
    return z;
}

}  // namespace

ChannelFit fit_channel(double f_i, const WdmGrid& grid, const FibreSpec& spec, const EngineSettings& settings)
{
    auto z = z_samples(spec, settings.fit_samples);
    std::vector<double> target(z.size());
    std::unique_ptr<OdeProfile> ode;
    int ch = -1;
    if (settings.profile_mode == ProfileMode::ode) {
        ch = grid.find_channel(f_i);
        if (ch < 0) throw Error(ErrorKind::numeric, "ODE reference profile needs a frequency inside a channel");
        ode = std::make_unique<OdeProfile>(grid, spec, settings.ode_steps_per_km);
    }
    for (std::size_t k = 0; k < z.size(); ++k)
        target[k] = std::sqrt(ode ? ode->rho(static_cast<std::size_t>(ch), z[k]) : rho_closed(z[k], f_i, grid, spec));
    return fit_from_samples(f_i, grid, spec, settings, z, target);
}

std::vector<ChannelFit> fit_all(const WdmGrid& grid, const FibreSpec& spec, const EngineSettings& settings)
{
    auto z = z_samples(spec, settings.fit_samples);
    std::unique_ptr<OdeProfile> ode;
    if (settings.profile_mode == ProfileMode::ode)
        ode = std::make_unique<OdeProfile>(grid, spec, settings.ode_steps_per_km);
    std::vector<ChannelFit> out;
    out.reserve(grid.size());
    std::vector<double> target(z.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t k = 0; k < z.size(); ++k)
            target[k] = std::sqrt(ode ? ode->rho(i, z[k]) : rho_closed(z[k], grid[i].f, grid, spec));
        out.push_back(fit_from_samples(grid[i].f, grid, spec, settings, z, target));
    }
    return out;
}

}  // namespace oband
