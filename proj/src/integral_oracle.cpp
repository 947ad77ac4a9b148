#include "oband/integral_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "oband/isrs_profile.hpp"
#include "oband/phase_matching.hpp"
#include "oband/special_functions.hpp"

namespace oband {

namespace {

constexpr double k16over27 = 16.0 / 27.0;

// Endpoint and interior weights of the exponential-linear rule,
// g0 = (e^w - 1 - w)/w^2, gn = (e^-w - 1 + w)/w^2, gint = g0 + gn.
void filon_weights(cplx w, cplx& g0, cplx& gn, cplx& gint)
{
    if (std::abs(w) < 0.1) {
        const cplx w2 = w * w, w3 = w2 * w, w4 = w2 * w2, w5 = w4 * w, w6 = w4 * w2, w7 = w6 * w;
        const cplx even = 0.5 + w2 / 24.0 + w4 / 720.0 + w6 / 40320.0;
        const cplx odd = w / 6.0 + w3 / 120.0 + w5 / 5040.0 + w7 / 362880.0;
        g0 = even + odd;
        gn = even - odd;
    } else {
        const cplx e = std::exp(w), em = std::exp(-w);
        g0 = (e - 1.0 - w) / (w * w);
        gn = (em - 1.0 + w) / (w * w);
    }
    gint = g0 + gn;
}

cplx filon_finish(const std::vector<double>& A, double L, double h, double abar, double phi, cplx S)
{
    cplx g0, gn, gint;
    filon_weights(cplx(-abar * h, phi * h), g0, gn, gint);
    const std::size_t n = A.size() - 1;
    const cplx tail = std::polar(1.0, phi * L);
    return h * (gint * S - (gint - g0) * A[0] - (gint - gn) * A[n] * tail);
}

double mean_decay(const std::vector<double>& A, double L)
{
    const double a0 = A.front(), an = A.back();
    if (a0 > 0.0 && an > 0.0) return std::log(a0 / an) / L;
    return 0.0;
}

// |int A e^{j phi z}|^2 for a batch of phases sharing one amplitude vector.
// S = sum_q A_q e^{j q theta} by Clenshaw with real coefficients.
void mu_batch(const std::vector<double>& A, double L, double h, double abar, const double* phi,
              std::size_t count, double* out)
{
    constexpr std::size_t kBatch = 64;
    const std::size_t nz = A.size() - 1;
    double c2[kBatch], b1[kBatch], b2[kBatch];
    for (std::size_t base = 0; base < count; base += kBatch) {
        const std::size_t nb = std::min(kBatch, count - base);
        for (std::size_t c = 0; c < nb; ++c) {
            c2[c] = 2.0 * std::cos(phi[base + c] * h);
            b1[c] = 0.0;
            b2[c] = 0.0;
        }
        for (std::size_t q = nz + 1; q-- > 0;) {
            const double a = A[q];
            for (std::size_t c = 0; c < nb; ++c) {
                const double b0 = a + c2[c] * b1[c] - b2[c];
                b2[c] = b1[c];
                b1[c] = b0;
            }
        }
        for (std::size_t c = 0; c < nb; ++c) {
            const double th = phi[base + c] * h;
            const cplx S(b1[c] - b2[c] * std::cos(th), b2[c] * std::sin(th));
            out[base + c] = std::norm(filon_finish(A, L, h, abar, phi[base + c], S));
        }
    }
}

}  // namespace

cplx z_integral(const std::vector<double>& A, double L, double phi)
{
    if (A.size() < 2) throw Error(ErrorKind::numeric, "z_integral needs at least two nodes");
    const std::size_t n = A.size() - 1;
    const double h = L / static_cast<double>(n);
    cplx S = 0.0;
    for (std::size_t q = 0; q <= n; ++q) S += A[q] * std::polar(1.0, phi * h * static_cast<double>(q));
    return filon_finish(A, L, h, mean_decay(A, L), phi, S);
}

cplx z_integral_trapezoid(const std::vector<double>& A, double L, double phi)
{
    if (A.size() < 2) throw Error(ErrorKind::numeric, "z_integral needs at least two nodes");
    const std::size_t n = A.size() - 1;
    const double h = L / static_cast<double>(n);
    cplx s = 0.5 * (A[0] + A[n] * std::polar(1.0, phi * L));
    for (std::size_t q = 1; q < n; ++q) s += A[q] * std::polar(1.0, phi * h * static_cast<double>(q));
    return h * s;
}

IntegralOracle::IntegralOracle(SystemModel model) : model_(std::move(model))
{
    validate(model_.fibre);
    validate(model_.grid);
    const auto& os = model_.engine.oracle;
    if (!(os.z_steps_per_km > 0.0) || os.riemann_samples_per_axis < 1)
        throw Error(ErrorKind::validation, "oracle resolution must be positive");
    betas_ = dispersion_to_betas(model_.fibre);
    const double L = model_.fibre.span_length;
    nz_ = static_cast<std::size_t>(std::max(1.0, std::ceil(L * 1e-3 * os.z_steps_per_km - 1e-9)));
    h_ = L / static_cast<double>(nz_);
    if (model_.engine.profile_mode == ProfileMode::ode)
        ode_ = std::make_shared<OdeProfile>(model_.grid, model_.fibre, model_.engine.ode_steps_per_km);

    const auto& g = model_.grid;
    sqrt_rho_.assign(g.size(), std::vector<double>(nz_ + 1));
    for (std::size_t c = 0; c < g.size(); ++c) {
        for (std::size_t q = 0; q <= nz_; ++q) {
            const double z = h_ * static_cast<double>(q);
            const double r = ode_ ? ode_->rho(c, z) : rho_closed(z, g[c].f, g, model_.fibre);
            sqrt_rho_[c][q] = std::sqrt(r);
        }
    }
}

double IntegralOracle::rho_at(double f, double z) const
{
    if (!ode_) return rho_closed(z, f, model_.grid, model_.fibre);
    const int c = model_.grid.find_channel(f);
    if (c < 0) throw Error(ErrorKind::numeric, "ODE profile is only defined inside channels");
    return ode_->rho(static_cast<std::size_t>(c), z);
}

double IntegralOracle::mu(double f1, double f2, double f_i) const
{
    const double f3 = f1 + f2 - f_i;
    std::vector<double> A(nz_ + 1);
    for (std::size_t q = 0; q <= nz_; ++q) {
        const double z = h_ * static_cast<double>(q);
        A[q] = std::sqrt(rho_at(f1, z) * rho_at(f2, z) * rho_at(f3, z) / rho_at(f_i, z));
    }
    return std::norm(z_integral(A, model_.fibre.span_length, phi_exact(f1, f2, f_i, betas_)));
}

namespace {

Region rectangle_region(std::size_t j, std::size_t k, std::size_t i)
{
    if (j == i && k == i) return Region::spm;
    if ((j == i) != (k == i)) return Region::xpm;
    return Region::fwm;
}

Region membership_region(std::size_t j, std::size_t k, std::size_t m, std::size_t i)
{
    if (j == i && k == i && m == i) return Region::spm;
    if ((j == i && m == k) || (k == i && m == j)) return Region::xpm;
    return Region::fwm;
}

bool keep(Region filter, Region r) { return filter == Region::all || filter == r; }

}  // namespace

double IntegralOracle::cell_count(const std::vector<std::size_t>& channels) const
{
    const auto& g = model_.grid;
    const auto& os = model_.engine.oracle;
    const double R = os.riemann_samples_per_axis;
    const std::size_t n = g.size();
    const std::size_t runs = channels.empty() ? n : channels.size();
    double per_coi;
    if (os.tagging == RegionTagging::membership || os.region_filter == Region::all || os.region_filter == Region::fwm) {
        per_coi = R * R * static_cast<double>(n * (n + 1) / 2);
    } else if (os.region_filter == Region::spm) {
        per_coi = R * R;
    } else {
        per_coi = R * R * static_cast<double>(n - 1);
    }
    return per_coi * static_cast<double>(runs);
}

OracleChannelResult IntegralOracle::evaluate(std::size_t i) const
{
    const auto& g = model_.grid;
    const auto& os = model_.engine.oracle;
    const std::size_t n = g.size();
    const std::size_t R = static_cast<std::size_t>(os.riemann_samples_per_axis);
    const double L = model_.fibre.span_length;
    const int spans = g.n_spans;
    const double fi = g[i].f;

    RegionSums spm, xpm, fwm;
    auto sums_for = [&](Region r) -> RegionSums& {
        if (r == Region::spm) return spm;
        if (r == Region::xpm) return xpm;
        return fwm;
    };

    std::vector<std::vector<double>> amp(n);
    std::vector<double> abar(n);
    std::vector<double> f2s(R), phis(R), mus(R);
    std::vector<int> ms(R);

    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            const Region rect = rectangle_region(j, k, i);
            if (os.tagging == RegionTagging::rectangle && !keep(os.region_filter, rect)) continue;
            for (auto& a : amp) a.clear();
            const double sym = (j == k) ? 1.0 : 2.0;
            const double dA = g[j].B / R * g[k].B / R;
            const double gjk = g[j].P / g[j].B * g[k].P / g[k].B * dA * sym;
            for (std::size_t b = 0; b < R; ++b) f2s[b] = g[k].f - 0.5 * g[k].B + (b + 0.5) * g[k].B / R;

            for (std::size_t a = 0; a < R; ++a) {
                const double f1 = g[j].f - 0.5 * g[j].B + (a + 0.5) * g[j].B / R;
                for (std::size_t b = 0; b < R; ++b) ms[b] = g.find_channel(f1 + f2s[b] - fi);
                std::size_t b = 0;
                while (b < R) {
                    const int m = ms[b];
                    std::size_t e = b + 1;
                    while (e < R && ms[e] == m) ++e;
                    if (m >= 0) {
                        const std::size_t mm = static_cast<std::size_t>(m);
                        const Region r =
                            (os.tagging == RegionTagging::rectangle) ? rect : membership_region(j, k, mm, i);
                        if (keep(os.region_filter, r)) {
                            if (amp[mm].empty()) {
                                amp[mm].resize(nz_ + 1);
                                for (std::size_t q = 0; q <= nz_; ++q)
                                    amp[mm][q] = sqrt_rho_[j][q] * sqrt_rho_[k][q] * sqrt_rho_[mm][q] / sqrt_rho_[i][q];
                                abar[mm] = mean_decay(amp[mm], L);
                            }
                            const std::size_t cnt = e - b;
                            for (std::size_t c = 0; c < cnt; ++c) phis[c] = phi_exact(f1, f2s[b + c], fi, betas_);
                            mu_batch(amp[mm], L, h_, abar[mm], phis.data(), cnt, mus.data());
                            const double w = gjk * g[mm].P / g[mm].B;
                            double s_mu = 0.0, s_chi = 0.0;
                            for (std::size_t c = 0; c < cnt; ++c) {
                                s_mu += mus[c];
                                s_chi += mus[c] * phased_array(phis[c], L, spans);
                            }
                            RegionSums& rs = sums_for(r);
                            rs.mu += w * s_mu;
                            rs.mu_chi += w * s_chi;
                            rs.cells += sym * static_cast<double>(cnt);
                        }
                    }
                    b = e;
                }
            }
        }
    }

    const double gamma = model_.fibre.gamma;
    const double pi = g[i].P;
    const double pref = k16over27 * gamma * gamma * g[i].B / (pi * pi * pi);
    for (RegionSums* rs : {&spm, &xpm, &fwm}) {
        rs->mu *= pref;
        rs->mu_chi *= pref;
    }

    OracleChannelResult res;
    NliBreakdown& bd = res.breakdown;
    bd.channel = i;
    bd.f_offset = fi;
    bd.wavelength = wavelength_of(fi, model_.fibre.f_ref());
    bd.power = pi;
    bd.bandwidth = g[i].B;
    bd.n_spans = spans;
    const double ns = static_cast<double>(spans);
    bd.eta_spm_inc = ns * spm.mu;
    bd.eta_spm_cc = spm.mu_chi - ns * spm.mu;
    bd.eta_xpm_inc = ns * xpm.mu;
    bd.eta_xpm_cc = xpm.mu_chi - ns * xpm.mu;
    bd.eta_fwm_inc = ns * fwm.mu;
    bd.eta_fwm_cc = fwm.mu_chi - ns * fwm.mu;
    finish_breakdown(bd, model_.fibre, model_.engine);
    res.spm = spm;
    res.xpm = xpm;
    res.fwm = fwm;
    return res;
}

std::vector<OracleChannelResult> IntegralOracle::evaluate_all(const std::vector<std::size_t>& channels) const
{
    std::vector<std::size_t> idx = channels;
    if (idx.empty())
        for (std::size_t i = 0; i < model_.grid.size(); ++i) idx.push_back(i);
    for (std::size_t i : idx)
        if (i >= model_.grid.size()) throw Error(ErrorKind::validation, "channel index out of range");
    const double cells = cell_count(idx);
    if (cells > model_.engine.oracle.max_cells) {
        std::ostringstream os;
        os << "oracle run needs " << cells << " cells, budget is " << model_.engine.oracle.max_cells
           << "; lower riemann_samples_per_axis or request fewer channels";
        throw Error(ErrorKind::budget, os.str(), "/engine/oracle/max_cells");
    }

    std::vector<OracleChannelResult> out(idx.size());
    std::vector<std::exception_ptr> errors(idx.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t q = next++; q < idx.size(); q = next++) {
            try {
                out[q] = evaluate(idx[q]);
            } catch (...) {
                errors[q] = std::current_exception();
            }
        }
    };
    const int nt = std::max(1, std::min<int>(model_.engine.threads, static_cast<int>(idx.size())));
    if (nt == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace oband
