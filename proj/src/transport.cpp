#include "cbs/transport.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace cbs {

namespace {

constexpr std::uint64_t kMinPresentSamples = 50;

// |R(delta)|^2 = sigma / sigma0.
double resonance_strength(double delta) { return 0.25 / (delta * delta + 0.25); }

struct BatchAccumulator {
    std::vector<double> weight;
    std::vector<double> coherent;
    std::vector<std::uint64_t> count;
    double angular_weight = 0.0;
    std::vector<double> angular_coherent;
    double truncated = 0.0;

    BatchAccumulator(int max_order, std::size_t n_theta)
        : weight(max_order, 0.0), coherent(max_order, 0.0), count(max_order, 0), angular_coherent(n_theta, 0.0) {}
};

// Batch-means standard error of the ratio sum(num)/sum(den).
double ratio_std_error(std::vector<double> const& num, std::vector<double> const& den) {
    double total_num = 0.0;
    double total_den = 0.0;
    for (std::size_t b = 0; b < num.size(); ++b) {
        total_num += num[b];
        total_den += den[b];
    }
    if (!(total_den > 0.0) || num.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double const ratio = total_num / total_den;
    double ss = 0.0;
    for (std::size_t b = 0; b < num.size(); ++b) {
        double const r = num[b] - ratio * den[b];
        ss += r * r;
    }
    auto const nb = static_cast<double>(num.size());
    return std::sqrt(nb / (nb - 1.0) * ss) / total_den;
}

struct PhotonKernel {
    TransportEngine const& engine;
    EstimatorSettings const& est;
    bool reference = false;
    int angular_min = 2;
    int angular_max = 0;
    std::vector<Vec3> exit_dirs;

    PhotonKernel(TransportEngine const& e, EstimatorSettings const& s, bool ref) : engine(e), est(s), reference(ref) {
        int const max_order = engine.settings().max_order;
        angular_min = std::max(1, est.angular_order_min);
        angular_max = est.angular_order_max > 0 ? std::min(est.angular_order_max, max_order) : max_order;
        for (double t : est.theta) {
            exit_dirs.push_back(engine.exit_direction(t));
        }
    }

    void run(std::uint64_t index, BatchAccumulator& acc, std::vector<OrderSample>& samples) const {
        RandomStream rng(est.seed, index);
        PhotonPathRecord const path = engine.generate_path(rng);
        samples.clear();
        if (reference) {
            evaluate_reference(path, samples);
        } else {
            engine.evaluate_orders(path, samples);
        }
        Vec3 const k_in = path.entry_direction;
        for (auto const& s : samples) {
            auto const n = static_cast<std::size_t>(s.order - 1);
            acc.weight[n] += s.weight;
            acc.coherent[n] += s.weight * s.ratio.real();
            acc.count[n] += 1;
            if (s.order >= angular_min && s.order <= angular_max) {
                acc.angular_weight += s.weight;
                Vec3 const span = s.last_position - s.first_position;
                for (std::size_t t = 0; t < exit_dirs.size(); ++t) {
                    double phase = dot(k_in + exit_dirs[t], span);
                    Complex q = s.ratio;
                    if (reference && est.theta[t] != 0.0) {
                        q = reference_ratio(path.prefix(s.order), exit_dirs[t]);
                        phase = 0.0;
                    }
                    acc.angular_coherent[t] += s.weight * (q * std::polar(1.0, phase)).real();
                }
            }
        }
        acc.truncated += engine.truncated_weight(path, rng);
    }

    Complex reference_ratio(PhotonPathRecord const& sub, Vec3 const& k_out) const {
        return engine.reverse_amplitude(sub, k_out) / engine.direct_amplitude(sub, k_out);
    }

    void evaluate_reference(PhotonPathRecord const& path, std::vector<OrderSample>& out) const {
        Vec3 const k_out = engine.backscatter_direction();
        for (std::size_t n = 1; n <= path.order(); ++n) {
            PhotonPathRecord const sub = path.prefix(n);
            OrderSample s;
            s.order = static_cast<int>(n);
            s.weight = engine.path_weight(sub, k_out);
            s.ratio = reference_ratio(sub, k_out);
            s.first_position = sub.events.front().position;
            s.last_position = sub.events.back().position;
            out.push_back(s);
        }
    }
};

ContrastEstimate finalize(std::vector<BatchAccumulator> const& batches, EstimatorSettings const& est, int max_order) {
    ContrastEstimate result;
    result.photons = est.photons;
    result.batches = static_cast<int>(batches.size());
    result.theta = est.theta;
    auto const nb = batches.size();
    auto const photons = static_cast<double>(est.photons);

    result.batch_weight.reserve(nb);
    result.batch_coherent.reserve(nb);
    for (auto const& b : batches) {
        result.batch_weight.push_back(b.weight);
        result.batch_coherent.push_back(b.coherent);
        result.truncation_weight += b.truncated;
    }
    result.truncation_weight /= photons;

    std::vector<double> num(nb);
    std::vector<double> den(nb);
    for (int n = 0; n < max_order; ++n) {
        OrderContrast oc;
        oc.order = n + 1;
        double sw = 0.0;
        double sc = 0.0;
        std::size_t populated = 0;
        for (std::size_t b = 0; b < nb; ++b) {
            num[b] = batches[b].coherent[n];
            den[b] = batches[b].weight[n];
            sw += den[b];
            sc += num[b];
            oc.samples += batches[b].count[n];
            populated += den[b] > 0.0 ? 1 : 0;
        }
        oc.weight = sw / photons;
        oc.present = oc.samples >= kMinPresentSamples && sw > 0.0 && 2 * populated >= nb;
        if (oc.present) {
            oc.contrast = sc / sw;
            oc.std_error = ratio_std_error(num, den);
        } else {
            oc.contrast = std::numeric_limits<double>::quiet_NaN();
            oc.std_error = std::numeric_limits<double>::quiet_NaN();
        }
        result.orders.push_back(oc);
    }

    std::size_t const n_theta = est.theta.size();
    result.interference.assign(n_theta, std::numeric_limits<double>::quiet_NaN());
    result.interference_stderr.assign(n_theta, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < n_theta; ++t) {
        double sw = 0.0;
        double sc = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            num[b] = batches[b].angular_coherent[t];
            den[b] = batches[b].angular_weight;
            sw += den[b];
            sc += num[b];
        }
        if (sw > 0.0) {
            result.interference[t] = sc / sw;
            result.interference_stderr[t] = ratio_std_error(num, den);
        }
    }
    result.angular_half_width = half_width(result.theta, result.interference);

    double const frac = result.truncation_fraction();
    if (frac > 0.01) {
        result.warnings.push_back("truncation weight beyond max_order is " + std::to_string(100.0 * frac) +
                                  "% of the backscattered weight (limit 1%)");
    }
    return result;
}

ContrastEstimate run_estimator(TransportEngine const& engine, EstimatorSettings const& est, bool reference,
                               bool parallel) {
    if (est.photons < 1000) {
        throw std::invalid_argument("photon budget must be at least 1000");
    }
    if (est.batches < 16) {
        throw std::invalid_argument("at least 16 batches are required for batch-means errors");
    }
    if (est.theta.empty()) {
        throw std::invalid_argument("theta grid must not be empty");
    }
    int const max_order = engine.settings().max_order;
    auto const nb = static_cast<std::size_t>(est.batches);
    std::vector<BatchAccumulator> batches(nb, BatchAccumulator(max_order, est.theta.size()));
    PhotonKernel const kernel(engine, est, reference);
    auto const photons = est.photons;

    auto run_batch = [&](std::size_t b, std::vector<OrderSample>& samples) {
        std::uint64_t const begin = photons * b / nb;
        std::uint64_t const end = photons * (b + 1) / nb;
        for (std::uint64_t i = begin; i < end; ++i) {
            kernel.run(i, batches[b], samples);
        }
    };

    if (parallel) {
        int const workers = std::max(1, est.workers);
#pragma omp parallel num_threads(workers)
        {
            std::vector<OrderSample> samples;
            samples.reserve(static_cast<std::size_t>(max_order));
#pragma omp for schedule(dynamic, 1)
            for (std::size_t b = 0; b < nb; ++b) {
                run_batch(b, samples);
            }
        }
    } else {
        std::vector<OrderSample> samples;
        for (std::size_t b = 0; b < nb; ++b) {
            run_batch(b, samples);
        }
    }
    return finalize(batches, est, max_order);
}

}  // namespace

PhotonPathRecord PhotonPathRecord::prefix(std::size_t n) const {
    PhotonPathRecord sub = *this;
    n = std::min(n, events.size());
    sub.events.resize(n);
    if (n < events.size()) {
        sub.next_direction = events[n].k_in;
        sub.next_omega = events[n].omega_in;
        sub.escaped = false;
    }
    return sub;
}

TransportEngine::TransportEngine(TransportSettings settings)
    : settings_(std::move(settings)),
      response_(settings_.velocity),
      entry_direction_(settings_.geometry.entry_ray().direction),
      ell0_(settings_.geometry.ell0()) {
    if (settings_.max_order < 1) {
        throw std::invalid_argument("max_order must be >= 1");
    }
    if (!(settings_.laser_linewidth >= 0.0)) {
        throw std::invalid_argument("laser_linewidth must be >= 0");
    }
    auto const& v = settings_.velocity;
    if (v.kind() == VelocityKind::Gaussian && !v.is_static()) {
        double const events = 2.0 * settings_.max_order * std::max(1, settings_.truncation_horizon);
        double const reach = 10.0 + 8.0 * v.scale() * std::sqrt(events) + 8.0 * settings_.laser_linewidth;
        response_.tabulate(settings_.laser_detuning - reach, settings_.laser_detuning + reach);
    }
}

double TransportEngine::ell(double omega) const { return ell0_ / response_.fast(omega).real(); }

Complex TransportEngine::index_minus_one(double omega) const {
    return Complex{0.0, 1.0} * response_.fast(omega) / (2.0 * ell0_);
}

Vec3 TransportEngine::exit_direction(double theta) const {
    // Rotation of the backscattering direction -z in the x-z plane.
    return {std::sin(theta), 0.0, -std::cos(theta)};
}

PhotonPathRecord TransportEngine::generate_path(RandomStream& rng) const {
    auto const& geom = settings_.geometry;
    PhotonPathRecord path;
    Ray const entry = geom.entry_ray();
    path.entry_point = entry.origin;
    path.entry_direction = entry.direction;
    double laser = settings_.laser_detuning;
    if (settings_.laser_linewidth > 0.0) {
        laser += settings_.laser_linewidth * std::normal_distribution<double>{}(rng);
    }
    path.laser_detuning = laser;
    path.events.reserve(static_cast<std::size_t>(settings_.max_order));

    double const ell_laser = ell(laser);
    Vec3 pos = entry.origin;
    Vec3 dir = entry.direction;
    double omega = laser;
    while (path.events.size() < static_cast<std::size_t>(settings_.max_order)) {
        double const ell_local = ell(omega);
        double const ell_step = settings_.local_frequency_stepping ? ell_local : ell_laser;
        StepResult const step = sample_step(geom, Ray{pos, dir}, ell_step, rng);
        if (step.escaped) {
            path.escaped = true;
            break;
        }
        pos = step.point;
        Vec3 const vel = sample_velocity(settings_.velocity, rng);
        ScatteringEvent ev;
        ev.position = pos;
        ev.velocity = vel;
        ev.k_in = dir;
        ev.omega_in = omega;
        ev.weight_factor = resonance_strength(rest_frame_detuning(omega, dir, vel)) * ell_step / ell0_;
        if (!settings_.local_frequency_stepping) {
            ev.weight_factor *= std::exp(-step.length * (1.0 / ell_local - 1.0 / ell_step));
        }
        path.events.push_back(ev);
        Vec3 const next = sample_isotropic_direction(rng);
        omega += doppler_shift(dir, next, vel);
        dir = next;
    }
    path.next_direction = dir;
    path.next_omega = omega;
    return path;
}

double TransportEngine::truncated_weight(PhotonPathRecord const& path, RandomStream& rng) const {
    if (path.escaped || path.events.empty()) {
        return 0.0;
    }
    auto const& geom = settings_.geometry;
    Vec3 const k_out = backscatter_direction();
    double weight = 1.0;
    for (auto const& ev : path.events) {
        weight *= ev.weight_factor;
    }
    double const ell_laser = ell(path.laser_detuning);
    Vec3 pos = path.events.back().position;
    Vec3 dir = path.next_direction;
    double omega = path.next_omega;
    double total = 0.0;
    int const horizon = settings_.max_order * std::max(1, settings_.truncation_horizon);
    for (int order = settings_.max_order + 1; order <= horizon; ++order) {
        double const ell_local = ell(omega);
        double const ell_step = settings_.local_frequency_stepping ? ell_local : ell_laser;
        StepResult const step = sample_step(geom, Ray{pos, dir}, ell_step, rng);
        if (step.escaped) {
            break;
        }
        pos = step.point;
        Vec3 const vel = sample_velocity(settings_.velocity, rng);
        double factor = resonance_strength(rest_frame_detuning(omega, dir, vel)) * ell_step / ell0_;
        if (!settings_.local_frequency_stepping) {
            factor *= std::exp(-step.length * (1.0 / ell_local - 1.0 / ell_step));
        }
        weight *= factor;
        double const omega_exit = omega + doppler_shift(dir, k_out, vel);
        double const depth = geom.distance_to_boundary(Ray{pos, k_out});
        total += weight * std::exp(-depth / ell(omega_exit));
        Vec3 const next = sample_isotropic_direction(rng);
        omega += doppler_shift(dir, next, vel);
        dir = next;
    }
    return total;
}

std::pair<double, double> TransportEngine::outgoing_detunings(PhotonPathRecord const& path, Vec3 const& k_out) const {
    auto const& ev = path.events;
    std::size_t const n = ev.size();
    if (n == 0) {
        return {path.laser_detuning, path.laser_detuning};
    }
    double direct = path.laser_detuning;
    for (std::size_t j = 0; j < n; ++j) {
        Vec3 const out = j + 1 < n ? ev[j + 1].k_in : k_out;
        direct += doppler_shift(ev[j].k_in, out, ev[j].velocity);
    }
    double reverse = path.laser_detuning;
    for (std::size_t j = n; j-- > 0;) {
        Vec3 const in = j + 1 == n ? path.entry_direction : -ev[j + 1].k_in;
        Vec3 const out = j == 0 ? k_out : -ev[j].k_in;
        reverse += doppler_shift(in, out, ev[j].velocity);
    }
    return {direct, reverse};
}

Complex TransportEngine::direct_amplitude(PhotonPathRecord const& path, Vec3 const& k_out) const {
    auto const& geom = settings_.geometry;
    auto const& ev = path.events;
    std::size_t const n = ev.size();
    if (n == 0) {
        return {0.0, 0.0};
    }
    Vec3 const k_in = path.entry_direction;
    double omega = path.laser_detuning;
    Complex const i{0.0, 1.0};

    // Incident plane wave phase at the first atom and entry attenuation.
    double const entry_len = geom.distance_to_boundary(Ray{ev[0].position, -k_in});
    Complex amp = std::exp(i * dot(k_in, ev[0].position) + i * index_minus_one(omega) * entry_len);
    for (std::size_t j = 0; j < n; ++j) {
        Vec3 const out = j + 1 < n ? ev[j + 1].k_in : k_out;
        amp *= resonance_factor(Detuning{rest_frame_detuning(omega, ev[j].k_in, ev[j].velocity)});
        omega += doppler_shift(ev[j].k_in, out, ev[j].velocity);
        if (j + 1 < n) {
            double const r = norm(ev[j + 1].position - ev[j].position);
            amp *= std::exp(i * r + i * index_minus_one(omega) * r);
        }
    }
    double const exit_len = geom.distance_to_boundary(Ray{ev[n - 1].position, k_out});
    amp *= std::exp(-i * dot(k_out, ev[n - 1].position) + i * index_minus_one(omega) * exit_len);
    return amp;
}

Complex TransportEngine::reverse_amplitude(PhotonPathRecord const& path, Vec3 const& k_out) const {
    auto const& geom = settings_.geometry;
    auto const& ev = path.events;
    std::size_t const n = ev.size();
    if (n == 0) {
        return {0.0, 0.0};
    }
    Vec3 const k_in = path.entry_direction;
    double omega = path.laser_detuning;
    Complex const i{0.0, 1.0};

    double const entry_len = geom.distance_to_boundary(Ray{ev[n - 1].position, -k_in});
    Complex amp = std::exp(i * dot(k_in, ev[n - 1].position) + i * index_minus_one(omega) * entry_len);
    for (std::size_t j = n; j-- > 0;) {
        Vec3 const in = j + 1 == n ? k_in : -ev[j + 1].k_in;
        Vec3 const out = j == 0 ? k_out : -ev[j].k_in;
        amp *= resonance_factor(Detuning{rest_frame_detuning(omega, in, ev[j].velocity)});
        omega += doppler_shift(in, out, ev[j].velocity);
        if (j > 0) {
            double const r = norm(ev[j].position - ev[j - 1].position);
            amp *= std::exp(i * r + i * index_minus_one(omega) * r);
        }
    }
    double const exit_len = geom.distance_to_boundary(Ray{ev[0].position, k_out});
    amp *= std::exp(-i * dot(k_out, ev[0].position) + i * index_minus_one(omega) * exit_len);
    return amp;
}

double TransportEngine::path_weight(PhotonPathRecord const& path, Vec3 const& k_out) const {
    if (path.events.empty()) {
        return 0.0;
    }
    double weight = 1.0;
    for (auto const& ev : path.events) {
        weight *= ev.weight_factor;
    }
    double const omega_exit = outgoing_detunings(path, k_out).first;
    double const depth = settings_.geometry.distance_to_boundary(Ray{path.events.back().position, k_out});
    return weight * std::exp(-depth / ell(omega_exit));
}

void TransportEngine::evaluate_orders(PhotonPathRecord const& path, std::vector<OrderSample>& out) const {
    auto const& ev = path.events;
    std::size_t const m = ev.size();
    if (m == 0) {
        return;
    }
    auto const& geom = settings_.geometry;
    Vec3 const k_in = path.entry_direction;
    Vec3 const k_out = backscatter_direction();
    double const laser = path.laser_detuning;
    Complex const chi_laser = response_.fast(laser);

    // Per-event quantities shared by every prefix. At exact backscattering the
    // entry and exit legs of an atom coincide.
    struct Cache {
        Complex dir_denominator;  // rest-frame detuning + i/2, direct traversal
        Complex dir_chi;          // chi on the following segment, direct traversal
        double shift;             // Doppler shift along the walk
        double segment;           // distance to the next event
        double boundary;          // distance to the boundary along k_out
        double weight;            // cumulative weight factor
    };
    thread_local std::vector<Cache> cache;
    cache.resize(m);
    double cumulative = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        auto& c = cache[j];
        c.dir_denominator = Complex{rest_frame_detuning(ev[j].omega_in, ev[j].k_in, ev[j].velocity), 0.5};
        if (j + 1 < m) {
            c.shift = doppler_shift(ev[j].k_in, ev[j + 1].k_in, ev[j].velocity);
            c.segment = norm(ev[j + 1].position - ev[j].position);
            c.dir_chi = response_.fast(ev[j + 1].omega_in);
        }
        c.boundary = geom.distance_to_boundary(Ray{ev[j].position, k_out});
        cumulative *= ev[j].weight_factor;
        c.weight = cumulative;
    }

    double const inv_two_ell0 = 0.5 / ell0_;
    for (std::size_t n = 1; n <= m; ++n) {
        std::size_t const last = n - 1;
        double const exit_shift = doppler_shift(ev[last].k_in, k_out, ev[last].velocity);
        double const omega_exit_dir = ev[last].omega_in + exit_shift;
        Complex const chi_exit_dir = response_.fast(omega_exit_dir);

        // Reverse traversal: enters at the last atom with the laser frequency.
        double omega = laser;
        Complex ratio = cache[last].dir_denominator / Complex{rest_frame_detuning(omega, k_in, ev[last].velocity), 0.5};
        omega += exit_shift;
        Complex exponent{};
        for (std::size_t j = last; j-- > 0;) {
            exponent += (response_.fast(omega) - cache[j].dir_chi) * cache[j].segment;
            ratio *= cache[j].dir_denominator / Complex{omega + dot(ev[j + 1].k_in, ev[j].velocity), 0.5};
            omega += cache[j].shift;
        }
        Complex const chi_exit_rev = response_.fast(omega);
        exponent += (chi_laser - chi_exit_dir) * cache[last].boundary + (chi_exit_rev - chi_laser) * cache[0].boundary;

        OrderSample s;
        s.order = static_cast<int>(n);
        s.ratio = ratio * std::exp(-exponent * inv_two_ell0);
        s.weight = cache[last].weight * std::exp(-chi_exit_dir.real() * cache[last].boundary / ell0_);
        s.first_position = ev[0].position;
        s.last_position = ev[last].position;
        out.push_back(s);
    }
}

OrderContrast const* ContrastEstimate::order(int n) const {
    if (n < 1 || static_cast<std::size_t>(n) > orders.size()) {
        return nullptr;
    }
    return &orders[static_cast<std::size_t>(n - 1)];
}

double ContrastEstimate::total_weight() const {
    double total = 0.0;
    for (auto const& o : orders) {
        total += o.weight;
    }
    return total;
}

double ContrastEstimate::truncation_fraction() const {
    double const total = total_weight() + truncation_weight;
    return total > 0.0 ? truncation_weight / total : 0.0;
}

ContrastEstimate simulate(TransportEngine const& engine, EstimatorSettings const& est) {
    return run_estimator(engine, est, false, true);
}

ContrastEstimate simulate_reference(TransportEngine const& engine, EstimatorSettings const& est) {
    return run_estimator(engine, est, true, false);
}

ContrastEstimate contrast_per_order(TransportSettings const& transport, EstimatorSettings const& est) {
    TransportEngine const engine(transport);
    return simulate(engine, est);
}

Measurement enhancement_factor(ContrastEstimate const& est, EnhancementOptions const& options) {
    std::size_t const coherent_from = options.include_single_coherent ? 0 : 1;
    std::size_t const background_from = (options.include_single_background || options.include_single_coherent) ? 0 : 1;
    std::size_t const nb = est.batch_weight.size();
    std::vector<double> num(nb, 0.0);
    std::vector<double> den(nb, 0.0);
    double total_num = 0.0;
    double total_den = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        auto const& w = est.batch_weight[b];
        auto const& c = est.batch_coherent[b];
        for (std::size_t n = coherent_from; n < c.size(); ++n) {
            num[b] += c[n];
        }
        for (std::size_t n = background_from; n < w.size(); ++n) {
            den[b] += w[n];
        }
        total_num += num[b];
        total_den += den[b];
    }
    if (!(total_den > 0.0)) {
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    }
    return {1.0 + total_num / total_den, ratio_std_error(num, den)};
}

double half_width(std::vector<double> const& theta, std::vector<double> const& profile) {
    double const nan = std::numeric_limits<double>::quiet_NaN();
    if (theta.size() != profile.size() || theta.empty()) {
        return nan;
    }
    // Peak reference at the grid point closest to theta = 0.
    std::size_t peak = 0;
    for (std::size_t i = 1; i < theta.size(); ++i) {
        if (std::abs(theta[i]) < std::abs(theta[peak])) {
            peak = i;
        }
    }
    double const half = 0.5 * profile[peak];
    for (std::size_t i = peak + 1; i < theta.size(); ++i) {
        if (profile[i] <= half) {
            double const t0 = theta[i - 1];
            double const t1 = theta[i];
            double const f = (profile[i - 1] - half) / (profile[i - 1] - profile[i]);
            return t0 + f * (t1 - t0) - theta[peak];
        }
    }
    return nan;
}

std::vector<WalkDispersion> frequency_walk_stats(VelocityDistribution const& dist, int max_order,
                                                 std::uint64_t walks, std::uint64_t seed) {
    if (max_order < 1 || walks < 2) {
        throw std::invalid_argument("frequency_walk_stats needs max_order >= 1 and at least 2 walks");
    }
    auto const orders = static_cast<std::size_t>(max_order);
    std::vector<std::vector<double>> drift(orders, std::vector<double>(walks));
    for (std::uint64_t w = 0; w < walks; ++w) {
        RandomStream rng(seed, w);
        Vec3 dir{0, 0, 1};
        double omega = 0.0;
        for (std::size_t n = 0; n < orders; ++n) {
            Vec3 const vel = sample_velocity(dist, rng);
            Vec3 const next = sample_isotropic_direction(rng);
            omega += doppler_shift(dir, next, vel);
            dir = next;
            drift[n][w] = omega;
        }
    }
    std::vector<WalkDispersion> table;
    auto const count = static_cast<double>(walks);
    for (std::size_t n = 0; n < orders; ++n) {
        auto& values = drift[n];
        double mean = 0.0;
        for (double x : values) mean += x;
        mean /= count;
        double ss = 0.0;
        for (double x : values) ss += (x - mean) * (x - mean);
        auto quantile = [&](double p) {
            auto const k = static_cast<std::size_t>(p * (count - 1.0));
            std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
            return values[k];
        };
        double const q1 = quantile(0.25);
        double const q3 = quantile(0.75);
        table.push_back({static_cast<int>(n + 1), mean, std::sqrt(ss / (count - 1.0)), q3 - q1});
    }
    return table;
}

}  // namespace cbs
