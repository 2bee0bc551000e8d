#include "cbs/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#ifndef CBS_VERSION
#define CBS_VERSION "0.0.0"
#endif

namespace cbs {

using nlohmann::json;

namespace {

void write_file(std::filesystem::path const& path, std::string const& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

// Provenance header shared by every CSV file.
std::string provenance(RunConfig const& config) {
    return "# cbs-mc " + version_string() + "\n# config: " + to_json(config).dump() + "\n";
}

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string version_string() { return CBS_VERSION; }

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

RunResult run_single(RunConfig const& config) {
    config.validate();
    auto const start = std::chrono::steady_clock::now();
    RunResult result;
    result.config = config;
    TransportEngine const engine(config.transport());
    result.estimate = simulate(engine, config.estimator());
    result.enhancement = enhancement_factor(result.estimate, {config.include_single_coherent, true});
    if (config.velocity != VelocityKind::Static && config.kv_over_gamma > 0.0) {
        result.budget = coherence_scales(config.kv_over_gamma);
    }
    if (config.walk_photons >= 2) {
        result.walk = frequency_walk_stats(config.velocity_distribution(), config.max_order, config.walk_photons,
                                           derive_seed(config.seed, 0x57a1c));
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string orders_csv(RunResult const& result) {
    std::ostringstream os;
    os << provenance(result.config);
    os << "order,weight,contrast,stderr\n";
    for (auto const& o : result.estimate.orders) {
        if (o.weight == 0.0 && o.samples == 0) continue;
        os << o.order << ',' << format_number(o.weight) << ',' << format_number(o.contrast) << ','
           << format_number(o.std_error) << '\n';
    }
    return os.str();
}

std::string angular_csv(RunResult const& result) {
    std::ostringstream os;
    os << provenance(result.config);
    os << "theta,interference,stderr\n";
    auto const& e = result.estimate;
    for (std::size_t i = 0; i < e.theta.size(); ++i) {
        os << format_number(e.theta[i]) << ',' << format_number(e.interference[i]) << ','
           << format_number(e.interference_stderr[i]) << '\n';
    }
    return os.str();
}

std::string walk_csv(RunResult const& result) {
    std::ostringstream os;
    os << provenance(result.config);
    os << "order,mean,stddev,iqr\n";
    for (auto const& w : result.walk) {
        os << w.order << ',' << format_number(w.mean) << ',' << format_number(w.stddev) << ','
           << format_number(w.iqr) << '\n';
    }
    return os.str();
}

json budget_json(CoherenceBudget const& b) {
    return json{{"kv_over_gamma", b.kv_over_gamma},
                {"n_phi", nullable(b.n_phi)},
                {"tau_phi_gamma", nullable(b.tau_phi)},
                {"l_phi_over_ell", nullable(b.l_phi)},
                {"diffusion", b.diffusion},
                {"transport_time_gamma", b.transport_time},
                {"b_max", nullable(b.b_max)},
                {"b_max_floor", std::isfinite(b.b_max) ? json(b.b_max_floor) : json(nullptr)}};
}

json summary_json(RunResult const& result) {
    auto const& e = result.estimate;
    json orders = json::array();
    for (auto const& o : e.orders) {
        if (o.weight == 0.0 && o.samples == 0) continue;
        orders.push_back({{"order", o.order},
                          {"weight", o.weight},
                          {"contrast", nullable(o.contrast)},
                          {"stderr", nullable(o.std_error)},
                          {"samples", o.samples},
                          {"present", o.present}});
    }
    json summary{
        {"version", version_string()},
        {"config", to_json(result.config)},
        {"orders", orders},
        {"enhancement", nullable(result.enhancement.value)},
        {"enhancement_stderr", nullable(result.enhancement.std_error)},
        {"truncation_weight", e.truncation_weight},
        {"truncation_fraction", e.truncation_fraction()},
        {"angular_half_width", nullable(e.angular_half_width)},
        {"warnings", e.warnings},
        {"wall_time_s", result.wall_seconds},
    };
    CoherenceBudget const budget = result.budget.value_or(coherence_scales(0.0));
    json const fields = budget_json(budget);
    for (auto const& [key, value] : fields.items()) {
        summary[key] = value;
    }
    return summary;
}

EmittedFiles emit_results(RunResult const& result, std::filesystem::path const& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    EmittedFiles files;
    files.orders_csv = dir / "orders.csv";
    files.angular_csv = dir / "angular.csv";
    files.summary_json = dir / "summary.json";
    write_file(files.orders_csv, orders_csv(result));
    write_file(files.angular_csv, angular_csv(result));
    write_file(files.summary_json, summary_json(result).dump(2) + "\n");
    if (!result.walk.empty()) {
        files.walk_csv = dir / "frequency_walk.csv";
        write_file(files.walk_csv, walk_csv(result));
    }
    return files;
}

SweepResult run_sweep(SweepSpec const& spec) {
    spec.validate();
    SweepResult sweep;
    sweep.spec = spec;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        SweepPoint point;
        point.axis_value = spec.values[i];
        try {
            point.result = run_single(spec.point(i));
        } catch (std::exception const& e) {
            point.error = e.what();
        }
        sweep.points.push_back(std::move(point));
    }
    return sweep;
}

std::string sweep_csv(SweepResult const& sweep) {
    std::ostringstream os;
    os << "# cbs-mc " << version_string() << "\n# sweep: " << to_json(sweep.spec).dump() << "\n";
    os << "axis_value,enhancement,enhancement_stderr,c2,c2_stderr\n";
    double const nan = std::numeric_limits<double>::quiet_NaN();
    for (auto const& p : sweep.points) {
        double enh = nan, enh_err = nan, c2 = nan, c2_err = nan;
        if (p.result) {
            enh = p.result->enhancement.value;
            enh_err = p.result->enhancement.std_error;
            if (auto const* o = p.result->estimate.order(2); o && o->present) {
                c2 = o->contrast;
                c2_err = o->std_error;
            }
        }
        os << format_number(p.axis_value) << ',' << format_number(enh) << ',' << format_number(enh_err) << ','
           << format_number(c2) << ',' << format_number(c2_err) << '\n';
    }
    return os.str();
}

std::vector<std::filesystem::path> emit_sweep(SweepResult const& sweep, std::filesystem::path const& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    json points = json::array();
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        auto const& p = sweep.points[i];
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        json entry{{"index", i}, {"axis_value", p.axis_value}, {"directory", name}};
        if (p.result) {
            auto const files = emit_results(*p.result, dir / name);
            written.push_back(files.orders_csv);
            written.push_back(files.summary_json);
            entry["enhancement"] = nullable(p.result->enhancement.value);
        } else {
            entry["error"] = p.error;
        }
        points.push_back(entry);
    }
    auto const csv = dir / "sweep.csv";
    write_file(csv, sweep_csv(sweep));
    written.push_back(csv);
    auto const js = dir / "sweep.json";
    write_file(js, json{{"version", version_string()}, {"sweep", to_json(sweep.spec)}, {"points", points}}.dump(2) + "\n");
    written.push_back(js);
    return written;
}

}  // namespace cbs
