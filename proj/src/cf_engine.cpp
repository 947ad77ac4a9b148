#include "oband/cf_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "oband/log.hpp"
#include "oband/quadrature.hpp"
#include "oband/special_functions.hpp"

namespace oband {

namespace {

constexpr double k16over27 = 16.0 / 27.0;

// Channel whose centre sits at f (within the triplet tolerance), or -1.
int channel_at(const WdmGrid& g, double f)
{
    auto it = std::lower_bound(g.channels.begin(), g.channels.end(), f - kTripletTolerance,
                               [](const Channel& c, double x) { return c.f < x; });
    if (it == g.channels.end() || std::abs(it->f - f) > kTripletTolerance) return -1;
    return static_cast<int>(it - g.channels.begin());
}

// F(x) - F(y) with the large common parts cancelled analytically.
double big_f_diff(double x, double y)
{
    const double d = x - y;
    return d * std::atan(x) + y * atan_diff(x, y) - 0.5 * std::log1p(d * (x + y) / (1.0 + y * y));
}

// Real roots of a2 x^2 + a1 x + a0.
void quadratic_roots(double a2, double a1, double a0, std::vector<double>& out)
{
    if (a2 == 0.0) {
        if (a1 != 0.0) out.push_back(-a0 / a1);
        return;
    }
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0) return;
    const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
    if (q != 0.0) {
        out.push_back(q / a2);
        out.push_back(a0 / q);
    } else {
        out.push_back(0.0);
    }
}

}  // namespace

std::vector<Triplet> enumerate_triplets(const WdmGrid& grid, std::size_t i)
{
    std::vector<Triplet> out;
    const std::size_t n = grid.size();
    const double fi = grid[i].f;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        for (std::size_t k = j; k < n; ++k) {
            if (k == i) continue;
            const int m = channel_at(grid, grid[j].f + grid[k].f - fi);
            if (m < 0) continue;
            Triplet t;
            t.j = j;
            t.k = k;
            t.m = static_cast<std::size_t>(m);
            t.tau = (j == k) ? 1 : 2;
            t.set = (t.m == i) ? OmegaSet::omega1 : OmegaSet::omega2;
            out.push_back(t);
        }
    }
    return out;
}

double fwm_rect_closed(const LinkFnTerms& terms, const TaylorPhase& tp, double Bj, double Bk,
                       double* cond)
{
    const double p = 2.0 * tp.phi0;
    const double s1 = tp.phi1 * Bj;
    const double s2 = tp.phi2 * Bk;
    double sum = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < terms.terms.size(); ++q) {
        const double a2 = 2.0 * terms.terms[q].alpha_tilde;
        const double up = (p + s1 + s2) / a2, um = (p + s1 - s2) / a2;
        const double vp = (p - s1 + s2) / a2, vm = (p - s1 - s2) / a2;
        const double du = big_f_diff(up, um);
        const double dv = big_f_diff(vp, vm);
        const double w = terms.weights[q] * terms.terms[q].alpha_tilde;
        sum += w * (du - dv);
        scale += std::abs(w) * (std::abs(du) + std::abs(dv));
    }
    if (cond) *cond = (sum != 0.0) ? scale / std::abs(sum) : std::numeric_limits<double>::infinity();
    return 2.0 * sum / (tp.phi1 * tp.phi2);
}

double fwm_rect_fallback(const LinkFnTerms& terms, const TaylorPhase& tp, double Bj, double Bk,
                         double rel_tol)
{
    double s_in = tp.phi1, w_in = Bj, s_out = tp.phi2, w_out = Bk;
    if (std::abs(tp.phi2) * Bk > std::abs(tp.phi1) * Bj) {
        std::swap(s_in, s_out);
        std::swap(w_in, w_out);
    }
    const double h = 0.5 * s_in * w_in;

    // int over the inner axis of mu(c + s_in t), t in [-w_in/2, w_in/2]
    auto inner = [&](double c) {
        if (s_in == 0.0) return w_in * link_fn_fast(terms, c);
        double s = 0.0;
        for (std::size_t q = 0; q < terms.terms.size(); ++q) {
            const double a = terms.terms[q].alpha_tilde;
            s += terms.weights[q] * std::atan2(2.0 * h / a, 1.0 + (c * c - h * h) / (a * a));
        }
        return 2.0 * s / s_in;
    };
    if (s_out == 0.0) return w_out * inner(tp.phi0);

    std::vector<double> bp{-tp.phi0 / s_out, (h - tp.phi0) / s_out, (-h - tp.phi0) / s_out};
    auto r = integrate_adaptive([&](double t) { return inner(tp.phi0 + s_out * t); }, -0.5 * w_out,
                                0.5 * w_out, bp, rel_tol, 0.0, 20000);
    if (!r.converged) log(LogLevel::debug, "fwm fallback quadrature hit its interval cap");
    return r.value;
}

double coherence_factor(double inc, double cc, int n_spans)
{
    if (n_spans <= 1 || cc == 0.0 || inc <= 0.0) return 0.0;
    return std::log1p(cc / inc) / std::log(static_cast<double>(n_spans));
}

void finish_breakdown(NliBreakdown& b, const FibreSpec& fibre, const EngineSettings& settings)
{
    const int n = b.n_spans;
    b.epsilon_spm = coherence_factor(b.eta_spm_inc, b.eta_spm_cc, n);
    b.epsilon_xpm = coherence_factor(b.eta_xpm_inc, b.eta_xpm_cc, n);
    b.epsilon_fwm = coherence_factor(b.eta_fwm_inc, b.eta_fwm_cc, n);
    b.epsilon_total = coherence_factor(b.eta_inc(), b.eta_cc(), n);
    const double p = b.power;
    const double eta = b.eta_nli();
    b.snr_nli_db = -lin_to_db(eta * p * p);
    b.has_snr_total = settings.amplifier.enabled;
    if (b.has_snr_total) {
        double gain_db = settings.amplifier.gain_db;
        if (gain_db < 0.0) gain_db = 10.0 / std::log(10.0) * fibre.alpha(b.f_offset) * fibre.span_length;
        const double ase = ase_power(settings.amplifier.noise_figure_db, gain_db, fibre.f_ref() + b.f_offset,
                                     b.bandwidth);
        b.snr_total_db = lin_to_db(p / (n * ase + eta * p * p * p));
    }
}

Engine::Engine(SystemModel model) : model_(std::move(model))
{
    validate(model_.fibre);
    validate(model_.grid);
    betas_ = dispersion_to_betas(model_.fibre);
    fits_ = fit_all(model_.grid, model_.fibre, model_.engine);
}

Engine::Engine(SystemModel model, std::vector<ChannelFit> fits)
    : model_(std::move(model)), fits_(std::move(fits))
{
    validate(model_.fibre);
    validate(model_.grid);
    if (fits_.size() != model_.grid.size())
        throw Error(ErrorKind::validation, "need one fit per channel");
    betas_ = dispersion_to_betas(model_.fibre);
}

TripletContribution Engine::fwm_triplet(std::size_t i, const Triplet& t) const
{
    const auto& g = model_.grid;
    const auto& s = model_.engine;
    const double L = model_.fibre.span_length;
    TripletContribution c;
    c.j = t.j;
    c.k = t.k;
    c.m = t.m;
    c.i = i;
    c.tau = t.tau;
    c.set = t.set;
    c.taylor = taylor_phase(g[t.j].f, g[t.k].f, g[t.m].f, g[i].f, betas_);

    const LinkFnTerms terms = link_fn_terms(t.j, t.k, t.m, i, fits_, L, s.omega_indexing);
    const double Bj = g[t.j].B, Bk = g[t.k].B;
    const double amin = terms.alpha_tilde_min();
    bool fallback = std::min(std::abs(c.taylor.phi1) * Bj, std::abs(c.taylor.phi2) * Bk) <
                    s.degeneracy_threshold * amin;
    double integral = 0.0;
    if (!fallback) {
        double cond = 0.0;
        integral = fwm_rect_closed(terms, c.taylor, Bj, Bk, &cond);
        if (!(cond < 1e6) || !(integral >= 0.0) || !std::isfinite(integral)) fallback = true;
    }
    if (fallback) {
        integral = fwm_rect_fallback(terms, c.taylor, Bj, Bk);
        c.path = FwmPath::quadrature_fallback;
    }

    double norm;
    if (s.fwm_bandwidth_norm == FwmBandwidthNorm::max_cubed) {
        const double bmax = std::max({g[t.j].B, g[t.k].B, g[t.m].B});
        norm = bmax * bmax * bmax;
    } else {
        norm = g[t.j].B * g[t.k].B * g[t.m].B;
    }
    const double gamma = model_.fibre.gamma;
    // ratios first so that equal powers cancel exactly
    const double pi = g[i].P;
    const double pw = (g[t.j].P / pi) * (g[t.k].P / pi) * (g[t.m].P / pi);
    c.eta = k16over27 * t.tau * gamma * gamma * g[i].B / norm * pw * integral;
    return c;
}

double Engine::fwm_span(std::size_t i, std::vector<TripletContribution>* parts) const
{
    double sum = 0.0;
    for (const auto& t : enumerate_triplets(model_.grid, i)) {
        TripletContribution c = fwm_triplet(i, t);
        sum += c.eta;
        if (parts) parts->push_back(c);
    }
    return sum;
}

double Engine::fwm_total(std::size_t i, std::vector<TripletContribution>* parts) const
{
    return model_.grid.span_power_scale_sum() * fwm_span(i, parts);
}

double Engine::strip_integral(std::size_t i, std::size_t k, const LinkFnTerms& terms) const
{
    const auto& g = model_.grid;
    const double fi = g[i].f, fk = g[k].f;
    const double Bi = g[i].B, Bk = g[k].B;
    const double tol = model_.engine.quadrature_rel_tol;
    const double b4 = 2.0 * kPi * kPi / 3.0 * betas_.beta4;
    bool converged = true;

    auto inner = [&](double v) {
        const double f2 = fk + v;
        const double c = f2 - fi;
        std::vector<double> bp{0.0};
        // zeros of the dispersion bracket along u = f1 - f_i
        quadratic_roots(b4, kPi * betas_.beta3 + b4 * (1.5 * c + 3.0 * fi),
                        betas_.beta2 + kPi * betas_.beta3 * (fi + f2) + b4 * (c * c + 3.0 * c * fi + 3.0 * fi * fi),
                        bp);
        auto r = integrate_adaptive(
            [&](double u) { return link_fn_fast(terms, phi_exact(fi + u, f2, fi, betas_)); }, -0.5 * Bi,
            0.5 * Bi, bp, 0.1 * tol, 0.0, 4000);
        if (!r.converged) converged = false;
        return r.value;
    };
    std::vector<double> bp{fi - fk};
    auto r = integrate_adaptive(inner, -0.5 * Bk, 0.5 * Bk, bp, tol, 0.0, 4000);
    if (!r.converged || !converged) {
        std::ostringstream os;
        os << "SPM/XPM quadrature did not converge for channel " << i + 1 << " against " << k + 1
           << " (estimate " << r.value << ", error " << r.error << ")";
        throw Error(ErrorKind::numeric, os.str());
    }
    return r.value;
}

double Engine::spm_incoherent(std::size_t i) const
{
    const auto& g = model_.grid;
    const double gamma = model_.fibre.gamma;
    const LinkFnTerms terms = link_fn_terms_single(fits_[i], model_.fibre.span_length);
    return k16over27 * gamma * gamma / (g[i].B * g[i].B) * strip_integral(i, i, terms);
}

double Engine::xpm_incoherent(std::size_t i, std::size_t k) const
{
    const auto& g = model_.grid;
    const double gamma = model_.fibre.gamma;
    const LinkFnTerms terms = link_fn_terms_single(fits_[k], model_.fibre.span_length);
    const double ratio = g[k].P / g[i].P;
    return 2.0 * k16over27 * gamma * gamma * ratio * ratio / (g[k].B * g[k].B) *
           strip_integral(i, k, terms);
}

std::pair<double, double> Engine::spm_xpm_incoherent(std::size_t i) const
{
    double xpm = 0.0;
    for (std::size_t k = 0; k < model_.grid.size(); ++k)
        if (k != i) xpm += xpm_incoherent(i, k);
    return {spm_incoherent(i), xpm};
}

double Engine::spm_coherent(std::size_t i) const
{
    const int N = model_.grid.n_spans;
    if (N <= 1) return 0.0;
    const auto& g = model_.grid;
    const double L = model_.fibre.span_length;
    const double gamma = model_.fibre.gamma;
    const double Bi = g[i].B;
    const double phi = phi_spm(g[i].f, betas_);
    const bool si = model_.engine.spm_coherent_form == SpmCoherentForm::si;

    // sum_n (N - n) r(x_n), r(x) = atan(x)/x (or Si(x)/x), x_n = n phi L B^2 / 4
    double sn = 0.0;
    for (int n = 1; n < N; ++n) {
        const double x = n * phi * L * Bi * Bi / 4.0;
        double r;
        if (std::abs(x) < 1e-6)
            r = si ? 1.0 - x * x / 18.0 : 1.0 - x * x / 3.0;
        else
            r = (si ? sine_integral(x) : std::atan(x)) / x;
        sn += (N - n) * r;
    }
    const LinkFnTerms terms = link_fn_terms_single(fits_[i], L);
    double s = 0.0;
    for (const auto& a : terms.terms)
        for (const auto& b : terms.terms)
            s += a.coeff * b.coeff * a.kappa * b.kappa / (a.alpha_tilde * b.alpha_tilde);
    return k16over27 * gamma * gamma / (Bi * Bi) * s * 2.0 * Bi * Bi * sn;
}

double Engine::xpm_coherent(std::size_t i, std::size_t k) const
{
    const int N = model_.grid.n_spans;
    if (N <= 1) return 0.0;
    const auto& g = model_.grid;
    const double L = model_.fibre.span_length;
    const double gamma = model_.fibre.gamma;
    const double Bi = g[i].B, Bk = g[k].B;
    const double phi = phi_xpm(g[i].f, g[k].f, betas_);
    const bool sin_path = model_.engine.xpm_coherent_path == XpmCoherentPath::published_sin;
    const LinkFnTerms terms = link_fn_terms_single(fits_[k], L);

    double s = 0.0;
    for (const auto& a : terms.terms) {
        for (const auto& b : terms.terms) {
            const double aa = std::sqrt(a.alpha_tilde * b.alpha_tilde);
            const double w = a.coeff * b.coeff * a.kappa * b.kappa;
            double sn = 0.0;
            for (int n = 1; n < N; ++n) {
                const double A = n * L * aa;
                const double X = n * phi * L * Bi / 2.0;
                double J;  // int_0^{Bi/2} cos(n phi L f) / (aa^2 + phi^2 f^2) df
                if (std::abs(X) < 1e-6) {
                    J = Bi / (2.0 * aa * aa) * (1.0 - X * X / 6.0);
                } else {
                    const double c = sin_path ? cos_lorentz_integral_asymptotic(A, X) : cos_lorentz_integral(A, X);
                    J = n * L / phi * c;
                }
                sn += 2.0 * (N - n) * 2.0 * Bk * J;
            }
            s += w * sn;
        }
    }
    const double ratio = g[k].P / g[i].P;
    return 2.0 * k16over27 * gamma * gamma / (Bk * Bk) * ratio * ratio * s;
}

NliBreakdown Engine::evaluate(std::size_t i) const
{
    const auto& g = model_.grid;
    const auto& s = model_.engine;
    NliBreakdown b;
    b.channel = i;
    b.f_offset = g[i].f;
    b.wavelength = wavelength_of(g[i].f, model_.fibre.f_ref());
    b.power = g[i].P;
    b.bandwidth = g[i].B;
    b.n_spans = g.n_spans;
    b.fit_fallback = fits_[i].fallback;

    const auto inc = spm_xpm_incoherent(i);
    b.eta_spm_inc = g.n_spans * inc.first;
    b.eta_xpm_inc = g.n_spans * inc.second;
    if (s.coherent_corrections && g.n_spans > 1) {
        b.eta_spm_cc = spm_coherent(i);
        for (std::size_t k = 0; k < g.size(); ++k)
            if (k != i) b.eta_xpm_cc += xpm_coherent(i, k);
    }
    if (s.fwm) {
        std::vector<TripletContribution> parts;
        b.eta_fwm_inc = fwm_total(i, &parts);
        b.n_triplets = parts.size();
        for (const auto& p : parts)
            if (p.path == FwmPath::quadrature_fallback) ++b.n_fallback;
    }
    finish_breakdown(b, model_.fibre, s);
    for (const auto& [name, eps] : {std::pair<const char*, double>{"SPM", b.epsilon_spm}, {"XPM", b.epsilon_xpm},
                                    {"FWM", b.epsilon_fwm}, {"total", b.epsilon_total}}) {
        if (eps > 1.0 + 1e-6) {
            std::ostringstream os;
            os << "channel " << i + 1 << ": " << name << " coherence factor " << eps << " exceeds 1";
            log(LogLevel::warn, os.str());
        }
    }
    return b;
}

std::vector<NliBreakdown> Engine::evaluate_all(const std::vector<std::size_t>& channels) const
{
    std::vector<std::size_t> idx = channels;
    if (idx.empty())
        for (std::size_t i = 0; i < model_.grid.size(); ++i) idx.push_back(i);
    for (std::size_t i : idx)
        if (i >= model_.grid.size()) throw Error(ErrorKind::validation, "channel index out of range");

    std::vector<NliBreakdown> out(idx.size());
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
