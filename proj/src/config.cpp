#include "oband/system_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace oband {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg)
{
    throw Error(ErrorKind::validation, ptr + ": " + msg, ptr);
}

// Wraps an object node and rejects keys nobody asked for, so typos surface.
class Section {
public:
    Section(const json& node, std::string ptr) : node_(node), ptr_(std::move(ptr))
    {
        if (!node_.is_object()) fail(ptr_, "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }
    std::string at(const std::string& key) const { return ptr_ + "/" + key; }

    const json& get(const std::string& key)
    {
        used_.insert(key);
        if (!node_.contains(key)) fail(at(key), "required field missing");
        return node_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_number()) fail(at(key), "expected a number");
        double d = v.get<double>();
        if (!std::isfinite(d)) fail(at(key), "must be finite");
        return d;
    }

    double number(const std::string& key, double dflt)
    {
        if (!has(key)) {
            used_.insert(key);
            return dflt;
        }
        return number(key);
    }

    long integer(const std::string& key, long dflt)
    {
        used_.insert(key);
        if (!has(key)) return dflt;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) fail(at(key), "expected an integer");
        return v.get<long>();
    }

    bool boolean(const std::string& key, bool dflt)
    {
        used_.insert(key);
        if (!has(key)) return dflt;
        const json& v = node_.at(key);
        if (!v.is_boolean()) fail(at(key), "expected true or false");
        return v.get<bool>();
    }

    template <class E>
    E choice(const std::string& key, E dflt, const std::map<std::string, E>& options)
    {
        used_.insert(key);
        if (!has(key)) return dflt;
        const json& v = node_.at(key);
        if (v.is_string()) {
            auto it = options.find(v.get<std::string>());
            if (it != options.end()) return it->second;
        }
        std::string allowed;
        for (const auto& [name, _] : options) allowed += (allowed.empty() ? "" : ", ") + name;
        fail(at(key), "expected one of: " + allowed);
    }

    void finish() const
    {
        for (auto it = node_.begin(); it != node_.end(); ++it)
            if (!used_.count(it.key())) fail(at(it.key()), "unknown field");
    }

private:
    const json& node_;
    std::string ptr_;
    std::set<std::string> used_;
};

constexpr double kNepersPerDb = 1.0 / 4.342944819032518;

FibreSpec read_fibre(const json& root)
{
    Section s(root.at("fibre"), "/fibre");
    FibreSpec f;
    f.span_length = s.number("span_length_km") * 1e3;
    f.gamma = s.number("gamma_per_w_km") * 1e-3;
    f.raman_slope = s.number("raman_slope_per_w_km_thz", 0.0) * 1e-15;
    f.reference_wavelength = s.number("reference_wavelength_nm") * 1e-9;
    if (!(f.reference_wavelength > 0.0)) fail(s.at("reference_wavelength_nm"), "must be > 0");
    f.dispersion_D = s.number("dispersion_ps_nm_km", 0.0) * 1e-6;
    f.dispersion_S = s.number("slope_ps_nm2_km", 0.0) * 1e3;
    f.dispersion_Sdot = s.number("curvature_ps_nm3_km", 0.0) * 1e12;

    const json& a = s.get("attenuation_db_per_km");
    const std::string ap = s.at("attenuation_db_per_km");
    if (a.is_number()) {
        f.attenuation = AttenuationCurve::flat(a.get<double>() * kNepersPerDb * 1e-3);
    } else if (a.is_string() && a.get<std::string>() == "default_oband") {
        f.attenuation = default_oband_attenuation(f.f_ref());
    } else if (a.is_object()) {
        Section c(a, ap);
        const json& wl = c.get("wavelength_nm");
        const json& db = c.get("db_per_km");
        c.finish();
        if (!wl.is_array() || !db.is_array() || wl.size() != db.size() || wl.empty())
            fail(ap, "wavelength_nm and db_per_km must be equal-length non-empty arrays");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k < wl.size(); ++k) {
            if (!wl[k].is_number() || !db[k].is_number()) fail(ap, "samples must be numbers");
            double lam = wl[k].get<double>() * 1e-9;
            if (!(lam > 0.0)) fail(ap + "/wavelength_nm/" + std::to_string(k), "must be > 0");
            pts.emplace_back(offset_of_wavelength(lam, f.f_ref()), db[k].get<double>() * kNepersPerDb * 1e-3);
        }
        std::sort(pts.begin(), pts.end());
        for (auto& [fo, al] : pts) {
            f.attenuation.f_offset.push_back(fo);
            f.attenuation.alpha.push_back(al);
        }
    } else {
        fail(ap, "expected a number, \"default_oband\" or {wavelength_nm, db_per_km}");
    }
    s.finish();
    validate(f);
    return f;
}

WdmGrid read_grid(const json& root, double f_ref)
{
    Section s(root.at("grid"), "/grid");
    WdmGrid g;
    long spans = s.integer("n_spans", 1);
    if (spans < 1) fail(s.at("n_spans"), "must be >= 1");
    g.n_spans = static_cast<int>(spans);

    if (s.has("per_span_power_scale")) {
        const json& v = s.get("per_span_power_scale");
        if (!v.is_array()) fail(s.at("per_span_power_scale"), "expected an array");
        for (const auto& x : v) {
            if (!x.is_number()) fail(s.at("per_span_power_scale"), "entries must be numbers");
            g.per_span_power_scale.push_back(x.get<double>());
        }
    }

    bool has_gen = s.has("generator"), has_list = s.has("channels");
    if (has_gen == has_list) fail("/grid", "exactly one of generator or channels is required");

    if (has_gen) {
        Section gen(s.get("generator"), "/grid/generator");
        long count = gen.integer("count", 0);
        if (count < 1) fail(gen.at("count"), "must be >= 1");
        double spacing = gen.number("spacing_hz");
        double rate = gen.number("symbol_rate_hz");
        double p = dbm_to_w(gen.number("power_dbm_flat"));
        double centre = gen.number("centre_offset_hz", 0.0);
        gen.finish();
        if (!(spacing > 0.0) && count > 1) fail(gen.at("spacing_hz"), "must be > 0");
        if (!(rate > 0.0)) fail(gen.at("symbol_rate_hz"), "must be > 0");
        for (long n = 0; n < count; ++n) {
            double off = (static_cast<double>(n) - 0.5 * static_cast<double>(count - 1)) * spacing;
            g.channels.push_back({centre + off, rate, p});
        }
    } else {
        const json& list = s.get("channels");
        if (!list.is_array()) fail("/grid/channels", "expected an array");
        for (std::size_t k = 0; k < list.size(); ++k) {
            std::string cp = "/grid/channels/" + std::to_string(k);
            Section c(list[k], cp);
            int given = c.has("offset_hz") + c.has("frequency_hz") + c.has("wavelength_nm");
            if (given != 1) fail(cp, "exactly one of offset_hz, frequency_hz, wavelength_nm is required");
            Channel ch;
            if (c.has("offset_hz")) ch.f = c.number("offset_hz");
            if (c.has("frequency_hz")) ch.f = c.number("frequency_hz") - f_ref;
            if (c.has("wavelength_nm")) {
                double lam = c.number("wavelength_nm") * 1e-9;
                if (!(lam > 0.0)) fail(c.at("wavelength_nm"), "must be > 0");
                ch.f = offset_of_wavelength(lam, f_ref);
            }
            ch.B = c.number("bandwidth_hz");
            ch.P = dbm_to_w(c.number("power_dbm"));
            c.finish();
            g.channels.push_back(ch);
        }
        // lists given in wavelength order arrive descending in frequency
        std::stable_sort(g.channels.begin(), g.channels.end(),
                         [](const Channel& a, const Channel& b) { return a.f < b.f; });
    }
    s.finish();
    validate(g);
    return g;
}

EngineSettings read_engine(const json& root)
{
    EngineSettings e;
    if (!root.contains("engine")) return e;
    Section s(root.at("engine"), "/engine");
    e.coherent_corrections = s.boolean("coherent_corrections", e.coherent_corrections);
    e.fwm = s.boolean("fwm", e.fwm);
    e.degeneracy_threshold = s.number("degeneracy_threshold", e.degeneracy_threshold);
    if (!(e.degeneracy_threshold >= 0.0)) fail(s.at("degeneracy_threshold"), "must be >= 0");
    e.quadrature_rel_tol = s.number("quadrature_rel_tol", e.quadrature_rel_tol);
    if (!(e.quadrature_rel_tol > 0.0 && e.quadrature_rel_tol < 1e-2))
        fail(s.at("quadrature_rel_tol"), "must be in (0, 1e-2)");
    e.spm_coherent_form = s.choice<SpmCoherentForm>(
        "spm_coherent_form", e.spm_coherent_form,
        {{"atan", SpmCoherentForm::atan}, {"si", SpmCoherentForm::si}});
    e.xpm_coherent_path = s.choice<XpmCoherentPath>(
        "xpm_coherent_path", e.xpm_coherent_path,
        {{"e1_exact", XpmCoherentPath::e1_exact}, {"published_sin", XpmCoherentPath::published_sin}});
    e.omega_indexing = s.choice<OmegaIndexing>(
        "omega_indexing", e.omega_indexing,
        {{"appendix", OmegaIndexing::appendix}, {"as_printed", OmegaIndexing::as_printed}});
    e.fwm_bandwidth_norm = s.choice<FwmBandwidthNorm>(
        "fwm_bandwidth_norm", e.fwm_bandwidth_norm,
        {{"product", FwmBandwidthNorm::product}, {"max_cubed", FwmBandwidthNorm::max_cubed}});
    e.profile_mode = s.choice<ProfileMode>(
        "profile_mode", e.profile_mode, {{"analytic", ProfileMode::analytic}, {"ode", ProfileMode::ode}});
    long samples = s.integer("fit_samples", e.fit_samples);
    if (samples < 16 || samples > 1 << 20) fail(s.at("fit_samples"), "must be in [16, 1048576]");
    e.fit_samples = static_cast<int>(samples);
    e.fit_fallback_rms = s.number("fit_fallback_rms", e.fit_fallback_rms);
    e.ode_steps_per_km = s.number("ode_steps_per_km", e.ode_steps_per_km);
    if (!(e.ode_steps_per_km >= 2.0)) fail(s.at("ode_steps_per_km"), "must be >= 2");
    long threads = s.integer("threads", e.threads);
    if (threads < 1 || threads > 1024) fail(s.at("threads"), "must be in [1, 1024]");
    e.threads = static_cast<int>(threads);

    if (s.has("oracle")) {
        Section o(s.get("oracle"), "/engine/oracle");
        auto& q = e.oracle;
        q.z_steps_per_km = o.number("z_steps_per_km", q.z_steps_per_km);
        if (!(q.z_steps_per_km > 0.0)) fail(o.at("z_steps_per_km"), "must be > 0");
        long r = o.integer("riemann_samples_per_axis", q.riemann_samples_per_axis);
        if (r < 1 || r > 100000) fail(o.at("riemann_samples_per_axis"), "must be in [1, 100000]");
        q.riemann_samples_per_axis = static_cast<int>(r);
        q.region_filter = o.choice<Region>(
            "region_filter", q.region_filter,
            {{"all", Region::all}, {"spm", Region::spm}, {"xpm", Region::xpm}, {"fwm", Region::fwm}});
        q.tagging = o.choice<RegionTagging>(
            "tagging", q.tagging,
            {{"rectangle", RegionTagging::rectangle}, {"membership", RegionTagging::membership}});
        q.max_cells = o.number("max_cells", q.max_cells);
        if (!(q.max_cells > 0.0)) fail(o.at("max_cells"), "must be > 0");
        o.finish();
    }
    if (s.has("amplifier")) {
        Section a(s.get("amplifier"), "/engine/amplifier");
        e.amplifier.enabled = true;
        e.amplifier.noise_figure_db = a.number("noise_figure_db");
        e.amplifier.gain_db = a.number("gain_db", -1.0);
        a.finish();
    }
    s.finish();
    return e;
}

// Maps JSON pointers to the 1-based line where the key (or array element)
// starts. Runs on text that already parsed, so it can be lenient.
class LineIndex {
public:
    explicit LineIndex(const std::string& text) : t_(text) { value(""); }

    int line_of(std::string ptr) const
    {
        while (true) {
            auto it = lines_.find(ptr);
            if (it != lines_.end()) return it->second;
            auto slash = ptr.rfind('/');
            if (slash == std::string::npos) return 0;
            ptr.resize(slash);
        }
    }

private:
    void ws()
    {
        while (p_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[p_]))) {
            if (t_[p_] == '\n') ++line_;
            ++p_;
        }
    }

    std::string str()
    {
        std::string out;
        ++p_;
        while (p_ < t_.size() && t_[p_] != '"') {
            if (t_[p_] == '\\' && p_ + 1 < t_.size()) ++p_;
            out += t_[p_++];
        }
        ++p_;
        return out;
    }

    void value(const std::string& ptr)
    {
        ws();
        if (!lines_.count(ptr)) lines_[ptr] = line_;
        if (p_ >= t_.size()) return;
        char c = t_[p_];
        if (c == '{') {
            ++p_;
            while (true) {
                ws();
                if (p_ >= t_.size() || t_[p_] == '}') break;
                if (t_[p_] == ',') { ++p_; continue; }
                int key_line = line_;
                std::string key = str();
                lines_[ptr + "/" + key] = key_line;
                ws();
                if (p_ < t_.size() && t_[p_] == ':') ++p_;
                value(ptr + "/" + key);
            }
            ++p_;
        } else if (c == '[') {
            ++p_;
            int idx = 0;
            while (true) {
                ws();
                if (p_ >= t_.size() || t_[p_] == ']') break;
                if (t_[p_] == ',') { ++p_; continue; }
                value(ptr + "/" + std::to_string(idx++));
            }
            ++p_;
        } else if (c == '"') {
            str();
        } else {
            while (p_ < t_.size() && !std::strchr(",]} \t\r\n", t_[p_])) ++p_;
        }
    }

    const std::string& t_;
    std::size_t p_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

json parse_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1;
        for (std::size_t k = 0; k < e.byte && k < text.size(); ++k)
            if (text[k] == '\n') ++line;
        throw Error(ErrorKind::validation, "line " + std::to_string(line) + ": malformed JSON: " + e.what(), "");
    }
}

}  // namespace

SystemModel parse_config(const std::string& text)
{
    json root = parse_json(text);
    if (!root.is_object()) fail("", "top level must be an object");
    for (auto it = root.begin(); it != root.end(); ++it) {
        const std::string& k = it.key();
        if (k != "fibre" && k != "grid" && k != "engine" && k != "schema_version" && k != "description")
            fail("/" + k, "unknown section");
    }
    if (!root.contains("fibre")) fail("/fibre", "required section missing");
    if (!root.contains("grid")) fail("/grid", "required section missing");
    SystemModel m;
    m.fibre = read_fibre(root);
    m.grid = read_grid(root, m.fibre.f_ref());
    m.engine = read_engine(root);
    return m;
}

SystemModel load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<Diagnostic> validate_config_text(const std::string& text)
{
    std::vector<Diagnostic> out;
    try {
        parse_config(text);
    } catch (const Error& e) {
        Diagnostic d;
        d.field = e.field();
        d.message = e.what();
        if (!e.field().empty()) {
            d.line = LineIndex(text).line_of(e.field());
        } else {
            // parse errors carry "line N:" already
            const std::string w = e.what();
            if (w.rfind("line ", 0) == 0) d.line = std::atoi(w.c_str() + 5);
        }
        out.push_back(d);
    }
    return out;
}

}  // namespace oband
