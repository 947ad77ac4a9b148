#include "oband/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oband {

double lin_to_db(double x)
{
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(x);
}

double AttenuationCurve::at(double f) const
{
    if (alpha.empty()) return 0.0;
    if (alpha.size() == 1 || f <= f_offset.front()) return alpha.front();
    if (f >= f_offset.back()) return alpha.back();
    auto it = std::upper_bound(f_offset.begin(), f_offset.end(), f);
    std::size_t hi = static_cast<std::size_t>(it - f_offset.begin());
    std::size_t lo = hi - 1;
    double t = (f - f_offset[lo]) / (f_offset[hi] - f_offset[lo]);
    return alpha[lo] + t * (alpha[hi] - alpha[lo]);
}

AttenuationCurve AttenuationCurve::flat(double alpha)
{
    AttenuationCurve c;
    c.f_offset = {0.0};
    c.alpha = {alpha};
    return c;
}

double WdmGrid::total_power() const
{
    double p = 0.0;
    for (const auto& c : channels) p += c.P;
    return p;
}

double WdmGrid::band_low() const
{
    if (channels.empty()) return 0.0;
    return channels.front().f - 0.5 * channels.front().B;
}

double WdmGrid::band_high() const
{
    if (channels.empty()) return 0.0;
    return channels.back().f + 0.5 * channels.back().B;
}

int WdmGrid::find_channel(double f) const
{
    auto it = std::upper_bound(channels.begin(), channels.end(), f,
                               [](double v, const Channel& c) { return v < c.f; });
    // candidates: the channel just below f and the one just above
    for (int d = 0; d < 2; ++d) {
        std::ptrdiff_t idx = (it - channels.begin()) - 1 + d;
        if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(channels.size())) continue;
        const Channel& c = channels[static_cast<std::size_t>(idx)];
        if (f >= c.f - 0.5 * c.B && f < c.f + 0.5 * c.B) return static_cast<int>(idx);
    }
    return -1;
}

double WdmGrid::span_power_scale_sum() const
{
    if (per_span_power_scale.empty()) return static_cast<double>(n_spans);
    double s = 0.0;
    for (double v : per_span_power_scale) s += v;
    return s;
}

void validate(const FibreSpec& s)
{
    auto bad = [](const char* field, const std::string& msg) {
        throw Error(ErrorKind::validation, std::string(field) + ": " + msg, field);
    };
    if (!(s.span_length > 0.0) || !std::isfinite(s.span_length))
        bad("/fibre/span_length_km", "must be > 0");
    if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma)) bad("/fibre/gamma_per_w_km", "must be >= 0");
    if (!std::isfinite(s.raman_slope)) bad("/fibre/raman_slope_per_w_km_thz", "must be finite");
    if (!(s.reference_wavelength > 0.0)) bad("/fibre/reference_wavelength_nm", "must be > 0");
    if (!std::isfinite(s.dispersion_D) || !std::isfinite(s.dispersion_S) ||
        !std::isfinite(s.dispersion_Sdot))
        bad("/fibre", "dispersion values must be finite");
    const auto& a = s.attenuation;
    if (a.alpha.empty() || a.alpha.size() != a.f_offset.size())
        bad("/fibre/attenuation", "needs matching, non-empty samples");
    for (std::size_t i = 0; i < a.alpha.size(); ++i) {
        if (!(a.alpha[i] > 0.0) || !std::isfinite(a.alpha[i]))
            bad("/fibre/attenuation", "values must be > 0");
        if (i > 0 && !(a.f_offset[i] > a.f_offset[i - 1]))
            bad("/fibre/attenuation", "sample frequencies must be strictly monotone");
    }
}

void validate(const WdmGrid& g)
{
    if (g.n_spans < 1) throw Error(ErrorKind::validation, "n_spans must be >= 1", "/grid/n_spans");
    if (g.channels.empty())
        throw Error(ErrorKind::validation, "grid has no channels", "/grid");
    if (!g.per_span_power_scale.empty()) {
        if (g.per_span_power_scale.size() != static_cast<std::size_t>(g.n_spans))
            throw Error(ErrorKind::validation,
                        "per_span_power_scale needs one entry per span",
                        "/grid/per_span_power_scale");
        for (double v : g.per_span_power_scale)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorKind::validation, "per_span_power_scale entries must be >= 0",
                            "/grid/per_span_power_scale");
    }
    for (std::size_t i = 0; i < g.channels.size(); ++i) {
        const Channel& c = g.channels[i];
        std::string at = "/grid/channels/" + std::to_string(i);
        if (!(c.B > 0.0) || !std::isfinite(c.B))
            throw Error(ErrorKind::validation, "channel " + std::to_string(i + 1) + ": bandwidth must be > 0", at);
        if (!(c.P > 0.0) || !std::isfinite(c.P))
            throw Error(ErrorKind::validation, "channel " + std::to_string(i + 1) + ": power must be > 0", at);
        if (!std::isfinite(c.f))
            throw Error(ErrorKind::validation, "channel " + std::to_string(i + 1) + ": frequency not finite", at);
        if (i == 0) continue;
        const Channel& p = g.channels[i - 1];
        if (!(c.f > p.f))
            throw Error(ErrorKind::validation,
                        "channels " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            ": frequencies must be strictly increasing",
                        at);
        // small slack so that exactly abutting channels survive rounding
        double need = 0.5 * (c.B + p.B);
        if (c.f - p.f < need * (1.0 - 1e-12))
            throw Error(ErrorKind::validation,
                        "channels " + std::to_string(i) + " and " + std::to_string(i + 1) + " overlap",
                        at);
    }
}

BetaCoefficients dispersion_to_betas(const FibreSpec& s)
{
    const double lam = s.reference_wavelength;
    const double w = 2.0 * kPi * kSpeedOfLight;
    BetaCoefficients b;
    b.beta2 = -lam * lam * s.dispersion_D / w;
    b.beta3 = lam * lam * (2.0 * lam * s.dispersion_D + lam * lam * s.dispersion_S) / (w * w);
    b.beta4 = -lam * lam *
              (6.0 * lam * lam * s.dispersion_D + 6.0 * lam * lam * lam * s.dispersion_S +
               lam * lam * lam * lam * s.dispersion_Sdot) /
              (w * w * w);
    b.f_ref = s.f_ref();
    return b;
}

double ase_power(double noise_figure_db, double gain_db, double f_abs, double ref_bandwidth)
{
    double g = db_to_lin(gain_db);
    if (g <= 1.0) return 0.0;
    return db_to_lin(noise_figure_db) * (g - 1.0) * kPlanck * f_abs * ref_bandwidth;
}

double wavelength_of(double f_offset, double f_ref) { return kSpeedOfLight / (f_ref + f_offset); }

double offset_of_wavelength(double wavelength, double f_ref)
{
    return kSpeedOfLight / wavelength - f_ref;
}

AttenuationCurve default_oband_attenuation(double f_ref)
{
    AttenuationCurve c;
    // sample on wavelength, store ascending in frequency
    for (int k = 0; k <= 100; ++k) {
        double lam_nm = 1360.0 - k;
        double db_km = 0.12 + 0.21 * std::pow(1310.0 / lam_nm, 4);
        c.f_offset.push_back(offset_of_wavelength(lam_nm * 1e-9, f_ref));
        c.alpha.push_back(db_km / (10.0 * std::log10(std::exp(1.0))) / 1e3);
    }
    return c;
}

}  // namespace oband
