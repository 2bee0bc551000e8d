#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbs/medium_geometry.hpp"
#include "cbs/random.hpp"
#include "cbs/resonance_optics.hpp"
#include "cbs/vec3.hpp"
#include "cbs/velocity_model.hpp"

namespace cbs {

/// One scattering along a sampled path, in the direct traversal.
struct ScatteringEvent {
    Vec3 position;
    Vec3 velocity;
    Vec3 k_in;              // unit incoming wavevector (k = 1)
    double omega_in = 0.0;  // incoming lab-frame detuning
    // sigma(rest-frame detuning) / <sigma>(omega_in), times the stepping
    // correction when steps are not drawn at the local frequency.
    double weight_factor = 1.0;
};

/**
 * A multiple-scattering path sampled from the incoherent direct dynamics.
 *
 * The lab frequency chain obeys omega_in[j+1] = omega_in[j] + (k_in[j+1] -
 * k_in[j]) . v[j]. Any prefix of the events, closed by an exit direction,
 * is a complete path of that order.
 */
struct PhotonPathRecord {
    double laser_detuning = 0.0;
    Vec3 entry_point;
    Vec3 entry_direction{0, 0, 1};
    std::vector<ScatteringEvent> events;
    // Walk state after the last stored event.
    Vec3 next_direction;
    double next_omega = 0.0;
    bool escaped = false;  // false when stopped by max_order

    std::size_t order() const { return events.size(); }
    // First n events (exit direction supplied separately).
    PhotonPathRecord prefix(std::size_t n) const;
};

struct TransportSettings {
    MediumGeometry geometry = MediumGeometry::slab(1000.0);
    VelocityDistribution velocity;
    double laser_detuning = 0.0;
    int max_order = 60;
    bool local_frequency_stepping = true;
    double laser_linewidth = 0.0;  // rms Gaussian jitter of the incoming detuning
    // Walks alive at max_order continue for up to this multiple of max_order
    // to estimate the truncated weight.
    int truncation_horizon = 5;
};

/// Interference ratio and incoherent weight of one path order.
struct OrderSample {
    int order = 0;
    double weight = 0.0;
    Complex ratio{1.0, 0.0};  // A_rev conj(A_dir) / |A_dir|^2 at exact backscattering
    Vec3 first_position;
    Vec3 last_position;
};

/**
 * Immutable Monte-Carlo engine for coherent backscattering by moving resonant
 * scatterers. Amplitudes use the dimensionless resonance factor R for every
 * scattering and exp(i (n(omega) - 1) r) for every leg inside the medium,
 * with n the velocity-averaged effective index at the leg's lab frequency.
 */
class TransportEngine {
  public:
    explicit TransportEngine(TransportSettings settings);

    TransportSettings const& settings() const { return settings_; }
    ConvolvedResponse const& response() const { return response_; }

    // Mean free path and (n - 1) at a lab detuning.
    double ell(double omega) const;
    Complex index_minus_one(double omega) const;

    Vec3 backscatter_direction() const { return -entry_direction_; }
    Vec3 exit_direction(double theta) const;

    PhotonPathRecord generate_path(RandomStream& rng) const;

    // Backscattered weight of orders beyond max_order for a walk that did not
    // escape, continuing its random stream.
    double truncated_weight(PhotonPathRecord const& path, RandomStream& rng) const;

    // Full amplitudes for the whole record closed by exit direction k_out.
    Complex direct_amplitude(PhotonPathRecord const& path, Vec3 const& k_out) const;
    Complex reverse_amplitude(PhotonPathRecord const& path, Vec3 const& k_out) const;
    // Lab detunings of the outgoing light for both traversals.
    std::pair<double, double> outgoing_detunings(PhotonPathRecord const& path, Vec3 const& k_out) const;

    // Incoherent weight of the record closed by k_out (importance weight of
    // |A_dir|^2 under the sampling density).
    double path_weight(PhotonPathRecord const& path, Vec3 const& k_out) const;

    // Every prefix order of the record at exact backscattering, computed with
    // incremental ratios. Appends to out.
    void evaluate_orders(PhotonPathRecord const& path, std::vector<OrderSample>& out) const;

  private:
    TransportSettings settings_;
    ConvolvedResponse response_;
    Vec3 entry_direction_;
    double ell0_ = 1.0;
};

struct EstimatorSettings {
    std::uint64_t photons = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<double> theta{0.0};
    int angular_order_min = 2;
    int angular_order_max = 0;  // 0: up to max_order
    int batches = 64;
};

struct OrderContrast {
    int order = 0;
    double weight = 0.0;  // backscattered weight per incident photon
    double contrast = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    bool present = false;
};

struct Measurement {
    double value = 0.0;
    double std_error = 0.0;
};

struct EnhancementOptions {
    bool include_single_coherent = false;
    bool include_single_background = true;
};

/**
 * Per-order CBS contrast, with batch sums kept so enhancement factors and
 * errors can be derived for any order selection.
 */
struct ContrastEstimate {
    std::vector<OrderContrast> orders;  // index 0 is order 1
    double truncation_weight = 0.0;     // per incident photon
    std::uint64_t photons = 0;
    int batches = 0;
    std::vector<std::string> warnings;

    std::vector<double> theta;
    std::vector<double> interference;
    std::vector<double> interference_stderr;
    double angular_half_width = 0.0;  // NaN when undetermined

    // batch_weight[b][order-1], batch_coherent[b][order-1] = sum w Re q.
    std::vector<std::vector<double>> batch_weight;
    std::vector<std::vector<double>> batch_coherent;

    OrderContrast const* order(int n) const;
    double total_weight() const;
    double truncation_fraction() const;
};

/// OpenMP kernel. Results are independent of the worker count.
ContrastEstimate simulate(TransportEngine const& engine, EstimatorSettings const& est);

/// Serial reference: full direct and reverse amplitudes per path order.
ContrastEstimate simulate_reference(TransportEngine const& engine, EstimatorSettings const& est);

ContrastEstimate contrast_per_order(TransportSettings const& transport, EstimatorSettings const& est);

/// 1 + sum_{N >= N_min} w_N c_N / sum_N w_N.
Measurement enhancement_factor(ContrastEstimate const& est, EnhancementOptions const& options = {});

/// Half width at half maximum of an interference profile sampled on theta.
double half_width(std::vector<double> const& theta, std::vector<double> const& profile);

struct WalkDispersion {
    int order = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double iqr = 0.0;
};

/**
 * Lab detuning drift (omega_N - omega) / Gamma after N scatterings of an
 * isotropic walk in an unbounded medium, with velocities drawn from the
 * distribution. The interquartile range is the robust spread for
 * heavy-tailed velocities.
 */
std::vector<WalkDispersion> frequency_walk_stats(VelocityDistribution const& dist, int max_order,
                                                 std::uint64_t walks, std::uint64_t seed);

}  // namespace cbs
