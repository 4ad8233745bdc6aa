#include "granoise/io/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "granoise/constants.hpp"
#include "granoise/errors.hpp"
#include "granoise/units.hpp"

namespace granoise::io {

namespace {

using json = nlohmann::json;
using units::Kind;

constexpr int max_base_depth = 8;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parses JSON rejecting duplicate keys at any depth.
json parse_strict(std::string_view text, const std::string& origin) {
    std::vector<std::set<std::string>> scopes;
    std::string duplicate;
    const json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
        switch (event) {
            case json::parse_event_t::object_start:
                scopes.emplace_back();
                break;
            case json::parse_event_t::object_end:
                if (!scopes.empty()) scopes.pop_back();
                break;
            case json::parse_event_t::key:
                if (!scopes.empty() && !scopes.back().insert(parsed.get<std::string>()).second && duplicate.empty())
                    duplicate = parsed.get<std::string>();
                break;
            default:
                break;
        }
        return true;
    };
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), cb);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": parse error: " + e.what());
    }
    if (!duplicate.empty()) throw ConfigError(origin + ": duplicate key '" + duplicate + "'");
    if (!doc.is_object()) throw ConfigError(origin + ": top level must be an object");
    return doc;
}

json resolve_base(json doc, const std::filesystem::path& base_dir, int depth) {
    if (!doc.contains("base")) return doc;
    if (depth >= max_base_depth) throw ConfigError("key 'base': inheritance deeper than 8 levels");
    if (!doc["base"].is_string()) throw ConfigError("key 'base': expected a file name string");
    const std::filesystem::path base_path = base_dir / doc["base"].get<std::string>();
    json parent = parse_strict(read_file(base_path), base_path.string());
    parent = resolve_base(std::move(parent), base_path.parent_path(), depth + 1);
    doc.erase("base");
    parent.merge_patch(doc);
    return parent;
}

// Key-tracking view of a JSON object; finish() rejects keys never read.
class Reader {
  public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError("key '" + path_ + "': expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        if (!obj_.contains(key)) throw ConfigError("missing required key '" + full(key) + "'");
        used_.insert(key);
        return obj_.at(key);
    }

    Reader object(const std::string& key) { return Reader(raw(key), full(key)); }

    double quantity(const std::string& key, Kind kind) { return to_quantity(raw(key), kind, full(key)); }

    std::optional<double> optional_quantity(const std::string& key, Kind kind) {
        if (!has(key)) return std::nullopt;
        return quantity(key, kind);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError("key '" + full(key) + "': expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::uint64_t unsigned_integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_unsigned()) throw ConfigError("key '" + full(key) + "': expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError("key '" + full(key) + "': expected a string");
        return v.get<std::string>();
    }

    std::string string_or(const std::string& key, std::string fallback) {
        return has(key) ? string(key) : std::move(fallback);
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError("key '" + full(key) + "': expected true or false");
        return v.get<bool>();
    }

    std::vector<double> quantity_list(const std::string& key, Kind kind) {
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError("key '" + full(key) + "': expected an array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(to_quantity(v[i], kind, full(key) + "[" + std::to_string(i) + "]"));
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items())
            if (!used_.count(key)) throw ConfigError("unknown key '" + full(key) + "'");
    }

    std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    // Converts a JSON value; dimensional quantities must carry a unit string.
    static double to_quantity(const json& v, Kind kind, const std::string& key) {
        if (v.is_number()) {
            if (kind != Kind::dimensionless)
                throw ConfigError("key '" + key + "': " + std::string(units::to_string(kind)) +
                                  " needs a unit, e.g. \"" + v.dump() + " <unit>\"");
            return v.get<double>();
        }
        if (!v.is_string()) throw ConfigError("key '" + key + "': expected a quantity string");
        return units::parse_quantity(v.get<std::string>(), kind, key);
    }

  private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

template <class F>
auto rethrow_as_config(const std::string& key, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

Kind axis_kind(const std::string& variable, const std::string& key) {
    if (variable == "R" || variable == "R_times_J") return Kind::dimensionless;
    if (variable == "power_in") return Kind::power;
    if (variable == "waist") return Kind::length;
    throw ConfigError("key '" + key + "': unknown axis variable '" + variable +
                      "' (expected R, R_times_J, power_in, waist)");
}

Axis read_axis(Reader r) {
    Axis axis;
    axis.variable = r.string("variable");
    const Kind kind = axis_kind(axis.variable, r.full("variable"));
    const std::string scale = r.string_or("scale", "log");
    if (scale == "log")
        axis.scale = AxisScale::log;
    else if (scale == "linear")
        axis.scale = AxisScale::linear;
    else
        throw ConfigError("key '" + r.full("scale") + "': expected linear|log, got '" + scale + "'");
    axis.min = r.quantity("min", kind);
    axis.max = r.quantity("max", kind);
    const double points = r.number("points");
    if (points != std::floor(points) || points < 1 || points > 1e6)
        throw ConfigError("key '" + r.full("points") + "': expected an integer in [1, 1e6]");
    axis.points = static_cast<int>(points);
    r.finish();
    rethrow_as_config(r.full("variable"), [&] { axis.validate(); });
    return axis;
}

PhotonStatistics read_stats(Reader r) {
    PhotonStatistics s;
    s.mandel_Q = r.number("mandel_Q");
    s.sampler = rethrow_as_config(r.full("sampler"), [&] {
        return photon_sampler_from_string(r.string_or("sampler", "auto"));
    });
    r.finish();
    rethrow_as_config(r.full("mandel_Q"), [&] { s.validate(); });
    return s;
}

ResponseMode read_mode(Reader& r, const std::string& key, ResponseMode fallback) {
    if (!r.has(key)) return fallback;
    const std::string s = r.string(key);
    try {
        return response_mode_from_string(s);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + r.full(key) + "': " + e.what());
    }
}

void read_levels(Reader r, const BeamGeometry& geom, FourLevelParams& lv) {
    lv.omega_c_rabi = r.quantity("omega_c", Kind::angular_rate);
    lv.omega_s_rabi = r.quantity("omega_s", Kind::angular_rate);
    lv.delta_p = r.quantity("delta_p", Kind::angular_rate);
    lv.delta_c = r.quantity("delta_c", Kind::angular_rate);
    lv.delta_s = r.quantity("delta_s", Kind::angular_rate);
    lv.gamma2 = r.quantity("gamma2", Kind::angular_rate);
    lv.gamma3 = r.quantity("gamma3", Kind::angular_rate);
    lv.gamma4 = r.quantity("gamma4", Kind::angular_rate);
    lv.mu12 = r.quantity("mu12", Kind::dipole);
    lv.mu_s = r.quantity("mu_s", Kind::dipole);
    const double lambda_c = r.quantity("coupling_wavelength", Kind::length);
    const std::string config = r.string("beam_configuration");
    double sign = 0.0;
    if (config == "counter-propagating")
        sign = -1.0;
    else if (config == "co-propagating")
        sign = 1.0;
    else
        throw ConfigError("key '" + r.full("beam_configuration") +
                          "': expected counter-propagating|co-propagating, got '" + config + "'");
    if (!(lambda_c > 0.0)) throw ConfigError("key '" + r.full("coupling_wavelength") + "': must be > 0");
    lv.k_p = constants::two_pi / geom.lambda_p;
    lv.k_c = sign * constants::two_pi / lambda_c;
    if (r.has("dephasing")) {
        Reader d = r.object("dephasing");
        const char* names[6] = {"21", "31", "41", "32", "42", "43"};
        for (int i = 0; i < 6; ++i)
            if (d.has(names[i])) lv.dephasing[i] = d.quantity(names[i], Kind::angular_rate);
        d.finish();
    }
    r.finish();
}

}  // namespace

std::string_view to_string(AxisScale s) {
    return s == AxisScale::log ? "log" : "linear";
}

void Axis::validate() const {
    if (points < 1) throw DomainError("axis '" + variable + "': points must be >= 1");
    if (!std::isfinite(min) || !std::isfinite(max)) throw DomainError("axis '" + variable + "': non-finite range");
    if (min > max) throw DomainError("axis '" + variable + "': min > max");
    if (scale == AxisScale::log && !(min > 0.0)) throw DomainError("axis '" + variable + "': log scale needs min > 0");
    if (variable != "R" && variable != "R_times_J" && !(min > 0.0))
        throw DomainError("axis '" + variable + "': values must be > 0");
    if (min < 0.0) throw DomainError("axis '" + variable + "': values must be >= 0");
}

std::vector<double> Axis::values() const {
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = min;
        return out;
    }
    const int last = points - 1;
    for (int k = 0; k <= last; ++k) {
        const double t = static_cast<double>(k) / last;
        out[k] = scale == AxisScale::log ? min * std::pow(max / min, t) : min + (max - min) * t;
    }
    out[0] = min;
    out[last] = max;
    return out;
}

const Axis& SweepSpec::single_axis(std::string_view variable) const {
    if (axes.size() != 1)
        throw ConfigError("sweep.axes: a 1D sweep needs exactly one axis, found " + std::to_string(axes.size()));
    if (axes[0].variable != variable)
        throw ConfigError("sweep.axes[0].variable: expected '" + std::string(variable) + "', found '" +
                          axes[0].variable + "'");
    return axes[0];
}

const Axis& SweepSpec::map_axis(std::string_view variable) const {
    if (axes.size() != 2)
        throw ConfigError("sweep.axes: a map needs exactly two axes, found " + std::to_string(axes.size()));
    for (const auto& a : axes)
        if (a.variable == variable) return a;
    throw ConfigError("sweep.axes: no axis with variable '" + std::string(variable) + "'");
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    json doc = resolve_base(parse_strict(text, "scenario"), base_dir, 0);
    Scenario sc;
    sc.canonical_json = doc.dump();  // std::map keys: sorted, whitespace-free

    Reader top(doc, "");
    sc.name = top.string_or("name", "");

    OperatingPoint& op = sc.base;
    {
        Reader g = top.object("gas");
        op.gas.density_n = g.quantity("density", Kind::density);
        op.gas.temperature_T = g.quantity("temperature", Kind::temperature);
        op.gas.mass_m = g.quantity("mass", Kind::mass);
        g.finish();
        rethrow_as_config("gas", [&] { op.gas.validate(); });
    }
    {
        Reader g = top.object("geometry");
        op.geometry.waist_w0 = g.quantity("waist", Kind::length);
        op.geometry.cell_length_L = g.quantity("cell_length", Kind::length);
        op.geometry.lambda_p = g.quantity("probe_wavelength", Kind::length);
        op.geometry.power_in = g.quantity("power_in", Kind::power);
        op.geometry.saturation_power = g.quantity("saturation_power", Kind::power);
        op.geometry.intensity = rethrow_as_config(g.full("intensity_convention"), [&] {
            return intensity_convention_from_string(g.string_or("intensity_convention", "peak"));
        });
        g.finish();
        rethrow_as_config("geometry", [&] { op.geometry.validate(); });
    }
    read_levels(top.object("levels"), op.geometry, op.levels);
    rethrow_as_config("levels", [&] { op.levels.validate(); });
    if (top.has("readout")) {
        Reader r = top.object("readout");
        const std::string q = r.string_or("quadrature", "I");
        if (q == "I")
            op.readout.quadrature_q = Quadrature::I;
        else if (q == "R")
            op.readout.quadrature_q = Quadrature::R;
        else
            throw ConfigError("key '" + r.full("quadrature") + "': expected R|I, got '" + q + "'");
        if (r.has("transduction_G")) {
            const json& g = r.raw("transduction_G");
            if (g.is_string() && g.get<std::string>() == "optical-depth")
                op.readout.transduction_G.reset();
            else if (g.is_number())
                op.readout.transduction_G = g.get<double>();
            else
                throw ConfigError("key '" + r.full("transduction_G") + "': expected a number or \"optical-depth\"");
        }
        op.readout.photon_transduction_nu = r.number_or("photon_transduction_nu", -1.0);
        r.finish();
        rethrow_as_config("readout", [&] { op.readout.validate(); });
    }
    if (top.has("stats")) op.stats = read_stats(top.object("stats"));
    op.mode = read_mode(top, "response", ResponseMode::full);
    if (top.has("quadrature")) {
        Reader q = top.object("quadrature");
        op.quadrature.method = rethrow_as_config(q.full("method"), [&] {
            return quadrature_method_from_string(q.string_or("method", "adaptive"));
        });
        op.quadrature.rel_tol = q.number_or("rel_tol", op.quadrature.rel_tol);
        op.quadrature.z_max = q.number_or("z_max", op.quadrature.z_max);
        op.quadrature.max_intervals = static_cast<int>(q.number_or("max_intervals", op.quadrature.max_intervals));
        op.quadrature.max_order = static_cast<int>(q.number_or("max_order", op.quadrature.max_order));
        q.finish();
        if (!(op.quadrature.rel_tol > 0.0) || !(op.quadrature.z_max > 0.0) || op.quadrature.max_intervals < 1)
            throw ConfigError("key 'quadrature': rel_tol, z_max and max_intervals must be positive");
    }
    if (top.has("counting_interval")) op.dt = top.quantity("counting_interval", Kind::time);
    rethrow_as_config("scenario", [&] { op.validate(); });

    if (top.has("sweep")) {
        Reader s = top.object("sweep");
        SweepSpec sweep;
        const json& axes = s.raw("axes");
        if (!axes.is_array() || axes.empty() || axes.size() > 2)
            throw ConfigError("key 'sweep.axes': expected an array of one or two axes");
        for (std::size_t i = 0; i < axes.size(); ++i)
            sweep.axes.push_back(read_axis(Reader(axes[i], "sweep.axes[" + std::to_string(i) + "]")));
        if (sweep.axes.size() == 2 && sweep.axes[0].variable == sweep.axes[1].variable)
            throw ConfigError("key 'sweep.axes': both axes sweep '" + sweep.axes[0].variable + "'");
        if (s.has("omega_s_list")) sweep.omega_s_list = s.quantity_list("omega_s_list", Kind::angular_rate);
        for (double w : sweep.omega_s_list)
            if (!(w >= 0.0)) throw ConfigError("key 'sweep.omega_s_list': values must be >= 0");
        if (s.has("q_list")) sweep.q_list = s.quantity_list("q_list", Kind::dimensionless);
        for (double q : sweep.q_list)
            if (!(q >= -1.0)) throw ConfigError("key 'sweep.q_list': Mandel Q must be >= -1");
        if (auto w = s.optional_quantity("inset_waist", Kind::length)) sweep.inset_waist = *w;
        if (s.has("r_crit_bracket")) {
            const auto b = s.quantity_list("r_crit_bracket", Kind::dimensionless);
            if (b.size() != 2 || !(b[0] > 0.0) || !(b[1] > b[0]))
                throw ConfigError("key 'sweep.r_crit_bracket': expected [low, high] with 0 < low < high");
            sweep.r_crit_bracket = std::make_pair(b[0], b[1]);
        }
        s.finish();
        sc.sweep = std::move(sweep);
    }

    if (top.has("mc")) {
        Reader m = top.object("mc");
        McSpec mc;
        mc.seed = m.unsigned_integer("seed");
        mc.trials = static_cast<std::size_t>(m.unsigned_integer("trials"));
        mc.n_at_mean = m.number("n_at_mean");
        mc.r_grid = read_axis(m.object("r_grid"));
        if (mc.r_grid.variable != "R" && mc.r_grid.variable != "R_times_J")
            throw ConfigError("key 'mc.r_grid.variable': expected R or R_times_J");
        if (m.has("target_J")) {
            mc.target_J = m.number("target_J");
            if (!(*mc.target_J > 0.0)) throw ConfigError("key 'mc.target_J': must be > 0");
        }
        mc.tolerance = m.number_or("tolerance", mc.tolerance);
        if (!(mc.tolerance > 0.0)) throw ConfigError("key 'mc.tolerance': must be > 0");
        mc.mode = read_mode(m, "response", ResponseMode::weak_probe);
        mc.reference = rethrow_as_config(m.full("reference"), [&] {
            return photon_reference_from_string(m.string_or("reference", "incident"));
        });
        if (m.has("stats")) mc.stats = read_stats(m.object("stats"));
        mc.linearized_comparison = m.boolean_or("linearized_comparison", true);
        m.finish();
        if (mc.trials < 2) throw ConfigError("key 'mc.trials': must be >= 2");
        if (!(mc.n_at_mean > 0.0)) throw ConfigError("key 'mc.n_at_mean': must be > 0");
        sc.mc = std::move(mc);
    }
    top.finish();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return parse_scenario(text, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.filename().string() + ": " + e.what());
    }
}

}  // namespace granoise::io
