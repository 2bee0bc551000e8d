// Command-line front end: `run`, `sweep` and `budget`.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbs/coherence_analytics.hpp"
#include "cbs/config.hpp"
#include "cbs/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> photons;
    std::optional<int> workers;
    std::optional<std::string> out;

    void apply(cbs::RunConfig& cfg) const {
        if (seed) cfg.seed = *seed;
        if (photons) cfg.photons = *photons;
        if (workers) cfg.workers = *workers;
        if (out) cfg.out = *out;
        cfg.validate();
    }
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Master seed (64-bit)");
    cmd->add_option("--photons", o.photons, "Photon budget");
    cmd->add_option("--workers", o.workers, "OpenMP worker count");
    cmd->add_option("--out", o.out, "Output directory");
}

void print_warnings(cbs::RunResult const& r) {
    for (auto const& w : r.estimate.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo coherent backscattering by moving resonant scatterers"};
    app.set_version_flag("--version", cbs::version_string());
    app.require_subcommand(1);

    std::string config_path;
    Overrides run_overrides;
    auto* run = app.add_subcommand("run", "Run a single configuration");
    run->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
    add_overrides(run, run_overrides);

    std::string sweep_path;
    Overrides sweep_overrides;
    auto* sweep = app.add_subcommand("sweep", "Sweep one axis of a base configuration");
    sweep->add_option("-c,--config", sweep_path, "Sweep definition (JSON)")->required();
    add_overrides(sweep, sweep_overrides);

    std::optional<double> kv;
    std::optional<double> v_si;
    std::optional<double> scale_si;
    double ell = 1.0;
    std::optional<double> b;
    auto* budget = app.add_subcommand("budget", "Analytic coherence budget (no Monte-Carlo)");
    budget->add_option("--kv", kv, "kv/Gamma");
    budget->add_option("--v", v_si, "1D velocity in m/s (with --gamma-over-k)");
    budget->add_option("--gamma-over-k", scale_si, "Velocity scale Gamma/k in m/s");
    budget->add_option("--ell", ell, "Mean free path (length unit of L_phi and D)");
    budget->add_option("--b", b, "Optical thickness to test against the mesoscopic bound");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            cbs::RunConfig cfg = cbs::load_config(config_path);
            run_overrides.apply(cfg);
            auto const result = cbs::run_single(cfg);
            auto const files = cbs::emit_results(result, cfg.out);
            print_warnings(result);
            std::cout << "enhancement " << cbs::format_number(result.enhancement.value) << " +- "
                      << cbs::format_number(result.enhancement.std_error) << "\n"
                      << "wrote " << files.orders_csv.string() << ", " << files.angular_csv.string() << ", "
                      << files.summary_json.string() << '\n';
        } else if (*sweep) {
            cbs::SweepSpec spec = cbs::load_sweep(sweep_path);
            sweep_overrides.apply(spec.base);
            spec.validate();
            auto const result = cbs::run_sweep(spec);
            auto const written = cbs::emit_sweep(result, spec.base.out);
            int failures = 0;
            for (auto const& p : result.points) {
                if (!p.error.empty()) {
                    ++failures;
                    std::cerr << "point " << cbs::format_number(p.axis_value) << " failed: " << p.error << '\n';
                } else {
                    print_warnings(*p.result);
                }
            }
            std::cout << "wrote " << written.size() << " files under " << spec.base.out << '\n';
            if (failures > 0) {
                return kExitRuntime;
            }
        } else if (*budget) {
            double x = 0.0;
            if (kv && (v_si || scale_si)) {
                throw cbs::ConfigError("--kv", "give either --kv or --v with --gamma-over-k");
            }
            if (kv) {
                x = *kv;
            } else if (v_si && scale_si) {
                if (!(*scale_si > 0.0)) throw cbs::ConfigError("--gamma-over-k", "must be > 0");
                x = *v_si / *scale_si;
            } else {
                throw cbs::ConfigError("--kv", "required (or --v with --gamma-over-k)");
            }
            if (!(x > 0.0)) throw cbs::ConfigError("--kv", "must be > 0");
            if (!(ell > 0.0)) throw cbs::ConfigError("--ell", "must be > 0");
            auto const scales = cbs::coherence_scales(x, ell);
            auto doc = cbs::budget_json(scales);
            doc["ell"] = ell;
            if (b) {
                doc["b"] = *b;
                doc["mesoscopic"] = cbs::is_mesoscopic(x, *b);
            }
            std::cout << doc.dump(2) << '\n';
        }
    } catch (cbs::ConfigError const& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
