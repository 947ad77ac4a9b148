#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace oband {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kPlanck = 6.62607015e-34;

enum class ErrorKind { validation, numeric, budget, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string field = {})
        : std::runtime_error(what), kind_(kind), field_(std::move(field)) {}
    ErrorKind kind() const { return kind_; }
    // JSON pointer of the offending config field, empty when not applicable.
    const std::string& field() const { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_w(double dbm) { return 1e-3 * db_to_lin(dbm); }
double lin_to_db(double x);

// Power loss coefficient over frequency offset, piecewise linear, clamped at
// the ends. A single sample is a flat curve.
struct AttenuationCurve {
    std::vector<double> f_offset;  // Hz, strictly increasing
    std::vector<double> alpha;     // 1/m

    double at(double f) const;
    static AttenuationCurve flat(double alpha);
};

struct FibreSpec {
    double span_length = 80e3;         // m
    double gamma = 2e-3;               // 1/(W m)
    double raman_slope = 0.0;          // 1/(W m Hz)
    AttenuationCurve attenuation;
    double dispersion_D = 0.0;         // s/m^2
    double dispersion_S = 0.0;         // s/m^3
    double dispersion_Sdot = 0.0;      // s/m^4
    double reference_wavelength = 1302.3e-9;  // m

    double alpha(double f) const { return attenuation.at(f); }
    double f_ref() const { return kSpeedOfLight / reference_wavelength; }
};

struct BetaCoefficients {
    double beta2 = 0.0;  // s^2/m
    double beta3 = 0.0;  // s^3/m
    double beta4 = 0.0;  // s^4/m
    double f_ref = 0.0;  // Hz, absolute
};

struct Channel {
    double f = 0.0;  // offset from f_ref, Hz
    double B = 0.0;  // Hz
    double P = 0.0;  // W
};

struct WdmGrid {
    std::vector<Channel> channels;
    int n_spans = 1;
    // (P_{i,q}/P_i)^2 per span; empty means all ones.
    std::vector<double> per_span_power_scale;

    std::size_t size() const { return channels.size(); }
    const Channel& operator[](std::size_t i) const { return channels[i]; }
    double total_power() const;
    double band_low() const;
    double band_high() const;
    double total_bandwidth() const { return band_high() - band_low(); }
    // Frequency about which the ISRS tilt pivots (middle of the occupied band).
    double raman_centre() const { return 0.5 * (band_low() + band_high()); }
    // Index of the channel whose passband [f-B/2, f+B/2) holds f, or -1.
    int find_channel(double f) const;
    double span_power_scale_sum() const;
};

enum class ProfileMode { analytic, ode };
enum class SpmCoherentForm { atan, si };
enum class XpmCoherentPath { e1_exact, published_sin };
enum class OmegaIndexing { appendix, as_printed };
enum class FwmBandwidthNorm { product, max_cubed };
enum class RegionTagging { rectangle, membership };
enum class Region { all, spm, xpm, fwm };

struct OracleSettings {
    double z_steps_per_km = 2.0;
    // Midpoint samples per channel bandwidth along each frequency axis.
    int riemann_samples_per_axis = 500;
    Region region_filter = Region::all;
    RegionTagging tagging = RegionTagging::rectangle;
    double max_cells = 5e9;
};

struct AmplifierSpec {
    bool enabled = false;
    double noise_figure_db = 5.0;
    // Negative means "compensate the span loss of each channel".
    double gain_db = -1.0;
};

struct EngineSettings {
    bool coherent_corrections = true;
    bool fwm = true;
    double degeneracy_threshold = 1e-3;
    double quadrature_rel_tol = 1e-7;
    SpmCoherentForm spm_coherent_form = SpmCoherentForm::atan;
    XpmCoherentPath xpm_coherent_path = XpmCoherentPath::e1_exact;
    OmegaIndexing omega_indexing = OmegaIndexing::appendix;
    FwmBandwidthNorm fwm_bandwidth_norm = FwmBandwidthNorm::product;
    ProfileMode profile_mode = ProfileMode::analytic;
    int fit_samples = 512;
    double fit_fallback_rms = 5e-3;
    double ode_steps_per_km = 4.0;
    int threads = 1;
    OracleSettings oracle;
    AmplifierSpec amplifier;
};

struct SystemModel {
    FibreSpec fibre;
    WdmGrid grid;
    EngineSettings engine;
};

// Config boundary. Engineering units are converted to SI here.
SystemModel load_config(const std::string& path);
SystemModel parse_config(const std::string& text);

struct Diagnostic {
    int line = 0;  // 1-based, 0 when unknown
    std::string field;
    std::string message;
};
// Runs the full loader and reports problems instead of throwing.
std::vector<Diagnostic> validate_config_text(const std::string& text);

void validate(const FibreSpec& spec);
void validate(const WdmGrid& grid);

// beta2 = -lambda^2 D / (2 pi c)
// beta3 = lambda^2 (2 lambda D + lambda^2 S) / (2 pi c)^2
// beta4 = -lambda^2 (6 lambda^2 D + 6 lambda^3 S + lambda^4 Sdot) / (2 pi c)^3
BetaCoefficients dispersion_to_betas(const FibreSpec& spec);

// Lumped amplifier ASE over ref_bandwidth, both polarisations:
// NF_lin (G - 1) h f B.
double ase_power(double noise_figure_db, double gain_db, double f_abs, double ref_bandwidth);

double wavelength_of(double f_offset, double f_ref);
double offset_of_wavelength(double wavelength, double f_ref);

// Default O-band loss curve, 0.12 + 0.21 (1310 nm / lambda)^4 dB/km sampled
// between 1260 and 1360 nm.
AttenuationCurve default_oband_attenuation(double f_ref);

}  // namespace oband
