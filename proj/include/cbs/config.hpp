#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbs/medium_geometry.hpp"
#include "cbs/transport.hpp"
#include "cbs/velocity_model.hpp"

namespace cbs {

/// Configuration or validation failure, tagged with the offending key path.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string key, std::string const& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
    std::string const& key() const { return key_; }

  private:
    std::string key_;
};

struct RunConfig {
    GeometryKind geometry = GeometryKind::Slab;
    double b = 13.0;  // sphere only
    double k_ell0 = 1000.0;
    VelocityKind velocity = VelocityKind::Static;
    double kv_over_gamma = 0.0;
    double detuning = 0.0;
    std::uint64_t photons = 100000;
    int max_order = 60;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<double> theta{0.0};
    int angular_order_min = 2;
    int angular_order_max = 0;
    std::string out = "results";
    bool include_single_coherent = false;
    bool local_frequency_stepping = true;
    double laser_linewidth = 0.0;
    std::uint64_t walk_photons = 0;

    void validate() const;
    TransportSettings transport() const;
    EstimatorSettings estimator() const;
    VelocityDistribution velocity_distribution() const;
};

enum class SweepAxis { Velocity, Detuning, OpticalThickness };

struct SweepSpec {
    SweepAxis axis = SweepAxis::Velocity;
    std::vector<double> values;
    RunConfig base;

    void validate() const;
    RunConfig point(std::size_t index) const;
};

SweepAxis parse_sweep_axis(std::string const& text);
std::string to_string(SweepAxis axis);

RunConfig parse_run_config(nlohmann::json const& doc, std::string const& prefix = "");
nlohmann::json to_json(RunConfig const& config);
RunConfig load_config(std::filesystem::path const& path);

SweepSpec parse_sweep_spec(nlohmann::json const& doc);
nlohmann::json to_json(SweepSpec const& spec);
SweepSpec load_sweep(std::filesystem::path const& path);

nlohmann::json read_json_file(std::filesystem::path const& path);

}  // namespace cbs
