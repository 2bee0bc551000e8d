#include "cbs/config.hpp"

#include <fstream>
#include <set>

#include "cbs/random.hpp"

namespace cbs {

using nlohmann::json;

namespace {

std::string join(std::string const& prefix, std::string const& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(json const& obj, std::set<std::string> const& allowed, std::string const& prefix) {
    for (auto const& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(join(prefix, key), "unknown key");
        }
    }
}

json const& require_object(json const& doc, std::string const& key) {
    if (!doc.is_object()) {
        throw ConfigError(key, "expected an object");
    }
    return doc;
}

double get_number(json const& v, std::string const& key) {
    if (!v.is_number()) {
        throw ConfigError(key, "expected a number");
    }
    return v.get<double>();
}

std::int64_t get_integer(json const& v, std::string const& key) {
    if (!v.is_number_integer()) {
        throw ConfigError(key, "expected an integer");
    }
    return v.get<std::int64_t>();
}

std::uint64_t get_seed(json const& v, std::string const& key) {
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(key, "expected a non-negative 64-bit integer");
}

bool get_bool(json const& v, std::string const& key) {
    if (!v.is_boolean()) {
        throw ConfigError(key, "expected true or false");
    }
    return v.get<bool>();
}

std::string get_string(json const& v, std::string const& key) {
    if (!v.is_string()) {
        throw ConfigError(key, "expected a string");
    }
    return v.get<std::string>();
}

template <class Fn>
auto parse_enum(json const& v, std::string const& key, Fn&& fn) {
    try {
        return fn(get_string(v, key));
    } catch (std::invalid_argument const& e) {
        throw ConfigError(key, e.what());
    }
}

}  // namespace

SweepAxis parse_sweep_axis(std::string const& text) {
    if (text == "velocity") return SweepAxis::Velocity;
    if (text == "detuning") return SweepAxis::Detuning;
    if (text == "optical_thickness") return SweepAxis::OpticalThickness;
    throw std::invalid_argument("unknown sweep axis '" + text + "' (expected velocity|detuning|optical_thickness)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Velocity: return "velocity";
        case SweepAxis::Detuning: return "detuning";
        case SweepAxis::OpticalThickness: return "optical_thickness";
    }
    return "velocity";
}

void RunConfig::validate() const {
    if (!(k_ell0 > 0.0) || !std::isfinite(k_ell0)) throw ConfigError("geometry.k_ell0", "must be finite and > 0");
    if (geometry == GeometryKind::Sphere && (!(b > 0.0) || !std::isfinite(b))) {
        throw ConfigError("geometry.b", "must be finite and > 0");
    }
    if (!(kv_over_gamma >= 0.0) || !std::isfinite(kv_over_gamma)) {
        throw ConfigError("velocity.kv_over_gamma", "must be finite and >= 0");
    }
    if (!std::isfinite(detuning)) throw ConfigError("detuning", "must be finite");
    if (photons < 1) throw ConfigError("photons", "must be >= 1");
    if (max_order < 1) throw ConfigError("max_order", "must be >= 1");
    if (workers < 1) throw ConfigError("workers", "must be >= 1");
    if (theta.empty()) throw ConfigError("theta", "must not be empty");
    for (std::size_t i = 1; i < theta.size(); ++i) {
        if (!(theta[i] > theta[i - 1])) throw ConfigError("theta", "must be strictly increasing");
    }
    if (angular_order_min < 1) throw ConfigError("angular_orders", "lower order must be >= 1");
    if (angular_order_max != 0 && angular_order_max < angular_order_min) {
        throw ConfigError("angular_orders", "upper order must be >= lower order");
    }
    if (!(laser_linewidth >= 0.0) || !std::isfinite(laser_linewidth)) {
        throw ConfigError("flags.laser_linewidth", "must be finite and >= 0");
    }
}

VelocityDistribution RunConfig::velocity_distribution() const {
    switch (velocity) {
        case VelocityKind::Static: return VelocityDistribution::static_atoms();
        case VelocityKind::Gaussian: return VelocityDistribution::gaussian(kv_over_gamma);
        case VelocityKind::LorentzLike: return VelocityDistribution::lorentz_like_from_label(kv_over_gamma);
    }
    return {};
}

TransportSettings RunConfig::transport() const {
    TransportSettings t;
    t.geometry = geometry == GeometryKind::Slab ? MediumGeometry::slab(k_ell0) : MediumGeometry::sphere(b, k_ell0);
    t.velocity = velocity_distribution();
    t.laser_detuning = detuning;
    t.max_order = max_order;
    t.local_frequency_stepping = local_frequency_stepping;
    t.laser_linewidth = laser_linewidth;
    return t;
}

EstimatorSettings RunConfig::estimator() const {
    EstimatorSettings e;
    e.photons = photons;
    e.seed = seed;
    e.workers = workers;
    e.theta = theta;
    e.angular_order_min = angular_order_min;
    e.angular_order_max = angular_order_max;
    return e;
}

RunConfig parse_run_config(json const& doc, std::string const& prefix) {
    require_object(doc, prefix);
    reject_unknown(doc,
                   {"geometry", "velocity", "detuning", "photons", "max_order", "seed", "workers", "theta",
                    "angular_orders", "out", "flags", "walk_photons"},
                   prefix);
    RunConfig cfg;

    auto const geo_key = join(prefix, "geometry");
    if (!doc.contains("geometry")) throw ConfigError(geo_key, "required");
    auto const& geo = require_object(doc["geometry"], geo_key);
    reject_unknown(geo, {"kind", "b", "k_ell0"}, geo_key);
    if (!geo.contains("kind")) throw ConfigError(join(geo_key, "kind"), "required");
    cfg.geometry = parse_enum(geo["kind"], join(geo_key, "kind"), parse_geometry_kind);
    if (geo.contains("b")) cfg.b = get_number(geo["b"], join(geo_key, "b"));
    if (geo.contains("k_ell0")) cfg.k_ell0 = get_number(geo["k_ell0"], join(geo_key, "k_ell0"));

    auto const vel_key = join(prefix, "velocity");
    if (!doc.contains("velocity")) throw ConfigError(vel_key, "required");
    auto const& vel = require_object(doc["velocity"], vel_key);
    reject_unknown(vel, {"kind", "kv_over_gamma", "v_m_per_s", "gamma_over_k_m_per_s"}, vel_key);
    if (!vel.contains("kind")) throw ConfigError(join(vel_key, "kind"), "required");
    cfg.velocity = parse_enum(vel["kind"], join(vel_key, "kind"), parse_velocity_kind);
    bool const has_si = vel.contains("v_m_per_s") || vel.contains("gamma_over_k_m_per_s");
    if (vel.contains("kv_over_gamma") && has_si) {
        throw ConfigError(vel_key, "give either kv_over_gamma or v_m_per_s with gamma_over_k_m_per_s, not both");
    }
    if (has_si) {
        if (!vel.contains("v_m_per_s") || !vel.contains("gamma_over_k_m_per_s")) {
            throw ConfigError(vel_key, "SI velocity needs both v_m_per_s and gamma_over_k_m_per_s");
        }
        double const v = get_number(vel["v_m_per_s"], join(vel_key, "v_m_per_s"));
        double const scale = get_number(vel["gamma_over_k_m_per_s"], join(vel_key, "gamma_over_k_m_per_s"));
        if (!(scale > 0.0)) throw ConfigError(join(vel_key, "gamma_over_k_m_per_s"), "must be > 0");
        if (!(v >= 0.0)) throw ConfigError(join(vel_key, "v_m_per_s"), "must be >= 0");
        cfg.kv_over_gamma = v / scale;
    } else if (vel.contains("kv_over_gamma")) {
        cfg.kv_over_gamma = get_number(vel["kv_over_gamma"], join(vel_key, "kv_over_gamma"));
    } else if (cfg.velocity != VelocityKind::Static) {
        throw ConfigError(join(vel_key, "kv_over_gamma"), "required for moving atoms");
    }

    if (doc.contains("detuning")) cfg.detuning = get_number(doc["detuning"], join(prefix, "detuning"));
    if (doc.contains("photons")) {
        auto const p = get_integer(doc["photons"], join(prefix, "photons"));
        if (p < 1) throw ConfigError(join(prefix, "photons"), "must be >= 1");
        cfg.photons = static_cast<std::uint64_t>(p);
    }
    if (doc.contains("max_order")) {
        cfg.max_order = static_cast<int>(get_integer(doc["max_order"], join(prefix, "max_order")));
    }
    if (doc.contains("seed")) cfg.seed = get_seed(doc["seed"], join(prefix, "seed"));
    if (doc.contains("workers")) cfg.workers = static_cast<int>(get_integer(doc["workers"], join(prefix, "workers")));
    if (doc.contains("theta")) {
        auto const key = join(prefix, "theta");
        auto const& t = doc["theta"];
        if (!t.is_array()) throw ConfigError(key, "expected an array of angles in radians");
        cfg.theta.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            cfg.theta.push_back(get_number(t[i], key + "[" + std::to_string(i) + "]"));
        }
    }
    if (doc.contains("angular_orders")) {
        auto const key = join(prefix, "angular_orders");
        auto const& a = doc["angular_orders"];
        if (!a.is_array() || a.size() != 2) throw ConfigError(key, "expected [min_order, max_order]");
        cfg.angular_order_min = static_cast<int>(get_integer(a[0], key + "[0]"));
        cfg.angular_order_max = static_cast<int>(get_integer(a[1], key + "[1]"));
    }
    if (doc.contains("out")) cfg.out = get_string(doc["out"], join(prefix, "out"));
    if (doc.contains("walk_photons")) {
        auto const w = get_integer(doc["walk_photons"], join(prefix, "walk_photons"));
        if (w < 0) throw ConfigError(join(prefix, "walk_photons"), "must be >= 0");
        cfg.walk_photons = static_cast<std::uint64_t>(w);
    }
    if (doc.contains("flags")) {
        auto const key = join(prefix, "flags");
        auto const& f = require_object(doc["flags"], key);
        reject_unknown(f, {"include_single_coherent", "local_frequency_stepping", "laser_linewidth"}, key);
        if (f.contains("include_single_coherent")) {
            cfg.include_single_coherent = get_bool(f["include_single_coherent"], join(key, "include_single_coherent"));
        }
        if (f.contains("local_frequency_stepping")) {
            cfg.local_frequency_stepping =
                get_bool(f["local_frequency_stepping"], join(key, "local_frequency_stepping"));
        }
        if (f.contains("laser_linewidth")) {
            cfg.laser_linewidth = get_number(f["laser_linewidth"], join(key, "laser_linewidth"));
        }
    }
    try {
        cfg.validate();
    } catch (ConfigError const& e) {
        throw ConfigError(join(prefix, e.key()), std::string(e.what()).substr(e.key().size() + 2));
    }
    return cfg;
}

json to_json(RunConfig const& c) {
    json geo{{"kind", to_string(c.geometry)}, {"k_ell0", c.k_ell0}};
    if (c.geometry == GeometryKind::Sphere) geo["b"] = c.b;
    return json{
        {"geometry", geo},
        {"velocity", {{"kind", to_string(c.velocity)}, {"kv_over_gamma", c.kv_over_gamma}}},
        {"detuning", c.detuning},
        {"photons", c.photons},
        {"max_order", c.max_order},
        {"seed", c.seed},
        {"workers", c.workers},
        {"theta", c.theta},
        {"angular_orders", {c.angular_order_min, c.angular_order_max}},
        {"out", c.out},
        {"walk_photons", c.walk_photons},
        {"flags",
         {{"include_single_coherent", c.include_single_coherent},
          {"local_frequency_stepping", c.local_frequency_stepping},
          {"laser_linewidth", c.laser_linewidth}}},
    };
}

json read_json_file(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file " + path.string());
    }
    try {
        return json::parse(in);
    } catch (json::parse_error const& e) {
        throw ConfigError("", "parse error in " + path.string() + ": " + e.what());
    }
}

RunConfig load_config(std::filesystem::path const& path) { return parse_run_config(read_json_file(path)); }

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("values", "sweep axis needs at least one value");
    if (axis == SweepAxis::OpticalThickness && base.geometry != GeometryKind::Sphere) {
        throw ConfigError("axis", "optical_thickness sweeps need a sphere geometry");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        point(i).validate();
    }
}

RunConfig SweepSpec::point(std::size_t index) const {
    RunConfig cfg = base;
    double const value = values.at(index);
    switch (axis) {
        case SweepAxis::Velocity: cfg.kv_over_gamma = value; break;
        case SweepAxis::Detuning: cfg.detuning = value; break;
        case SweepAxis::OpticalThickness: cfg.b = value; break;
    }
    cfg.seed = derive_seed(base.seed, index);
    return cfg;
}

SweepSpec parse_sweep_spec(json const& doc) {
    require_object(doc, "");
    reject_unknown(doc, {"axis", "values", "base"}, "");
    SweepSpec spec;
    if (!doc.contains("axis")) throw ConfigError("axis", "required");
    spec.axis = parse_enum(doc["axis"], "axis", parse_sweep_axis);
    if (!doc.contains("values") || !doc["values"].is_array()) throw ConfigError("values", "expected an array");
    for (std::size_t i = 0; i < doc["values"].size(); ++i) {
        spec.values.push_back(get_number(doc["values"][i], "values[" + std::to_string(i) + "]"));
    }
    if (!doc.contains("base")) throw ConfigError("base", "required");
    spec.base = parse_run_config(doc["base"], "base");
    spec.validate();
    return spec;
}

json to_json(SweepSpec const& spec) {
    return json{{"axis", to_string(spec.axis)}, {"values", spec.values}, {"base", to_json(spec.base)}};
}

SweepSpec load_sweep(std::filesystem::path const& path) { return parse_sweep_spec(read_json_file(path)); }

}  // namespace cbs
