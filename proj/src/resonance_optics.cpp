#include "cbs/resonance_optics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbs {

namespace {

// Above this rms, 64-node Gauss-Hermite no longer resolves the Lorentzian core
// to ~1e-12 and a trapezoid sum over the projected velocity takes over.
constexpr double kGaussHermiteMaxRms = 0.25;
constexpr int kGaussHermiteNodes = 64;
constexpr double kTrapezoidStep = 0.1;
constexpr double kTrapezoidReach = 14.0;  // in units of the rms

Complex slope_of_resonance(double delta) {
    Complex const d{delta, 0.5};
    return Complex{0.0, -0.5} / (d * d);
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_hermite: n must be >= 1");
    }
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    double const pim4 = std::pow(kPi, -0.25);
    int const m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double const p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double const z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                break;
            }
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

ConvolvedResponse::ConvolvedResponse(VelocityDistribution dist) : dist_(dist) {
    if (dist_.kind() == VelocityKind::Gaussian && !dist_.is_static()) {
        double const sigma = dist_.scale();
        method_ = Method::Quadrature;
        if (sigma <= kGaussHermiteMaxRms) {
            rule_ = gauss_hermite(kGaussHermiteNodes);
            for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
                rule_.nodes[i] *= std::sqrt(2.0) * sigma;
                rule_.weights[i] /= std::sqrt(kPi);
            }
        } else {
            // The integrand is analytic in a strip of half width 1/2 around
            // the real axis, so the trapezoid rule converges geometrically.
            double const h = std::min(kTrapezoidStep, sigma / 4.0);
            auto const half = static_cast<int>(std::ceil(kTrapezoidReach * sigma / h));
            double const norm = h / (std::sqrt(2.0 * kPi) * sigma);
            for (int k = -half; k <= half; ++k) {
                double const u = h * k;
                rule_.nodes.push_back(u);
                rule_.weights.push_back(norm * std::exp(-0.5 * u * u / (sigma * sigma)));
            }
        }
    }
}

ConvolvedResponse::Sample ConvolvedResponse::evaluate(double delta) const {
    if (dist_.is_static()) {
        return {resonance_factor(Detuning{delta}), slope_of_resonance(delta)};
    }
    if (dist_.kind() == VelocityKind::LorentzLike) {
        Complex const d{delta, 0.5 + dist_.scale()};
        return {Complex{0.0, 0.5} / d, Complex{0.0, -0.5} / (d * d)};
    }
    Complex value{};
    Complex slope{};
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        Complex const d{delta - rule_.nodes[i], 0.5};
        value += rule_.weights[i] * (Complex{0.0, 0.5} / d);
        slope += rule_.weights[i] * (Complex{0.0, -0.5} / (d * d));
    }
    return {value, slope};
}

Complex ConvolvedResponse::operator()(double delta) const { return evaluate(delta).value; }

Complex ConvolvedResponse::derivative(double delta) const { return evaluate(delta).slope; }

void ConvolvedResponse::tabulate(double lo, double hi) {
    if (method_ == Method::Exact || !(hi > lo)) {
        return;
    }
    double const step = std::max(0.5, dist_.scale()) / 128.0;
    auto const count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    table_lo_ = lo;
    table_step_ = step;
    table_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        table_[i] = evaluate(lo + step * static_cast<double>(i));
    }
}

Complex ConvolvedResponse::fast(double delta) const {
    if (table_.empty()) {
        return evaluate(delta).value;
    }
    double const t = (delta - table_lo_) / table_step_;
    if (!(t >= 0.0) || t >= static_cast<double>(table_.size() - 1)) {
        return evaluate(delta).value;
    }
    auto const i = static_cast<std::size_t>(t);
    double const s = t - static_cast<double>(i);
    double const s2 = s * s;
    double const s3 = s2 * s;
    double const h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    double const h10 = s3 - 2.0 * s2 + s;
    double const h01 = -2.0 * s3 + 3.0 * s2;
    double const h11 = s3 - s2;
    auto const& a = table_[i];
    auto const& b = table_[i + 1];
    return h00 * a.value + h01 * b.value + table_step_ * (h10 * a.slope + h11 * b.slope);
}

double mean_free_path(double density, Detuning delta, VelocityDistribution const& dist) {
    if (!(density > 0.0)) {
        throw std::domain_error("mean_free_path: density must be > 0");
    }
    double const sigma_eff = kSigma0 * ConvolvedResponse{dist}(delta.value).real();
    return 1.0 / (density * sigma_eff);
}

EffectiveIndex effective_index(double density, Detuning delta, VelocityDistribution const& dist) {
    if (!(density > 0.0)) {
        throw std::domain_error("effective_index: density must be > 0");
    }
    // (rho/2) <alpha> with <alpha> = 6 pi i chi.
    Complex const chi = ConvolvedResponse{dist}(delta.value);
    EffectiveIndex result;
    result.density = density;
    result.n = 1.0 + 3.0 * kPi * density * Complex{0.0, 1.0} * chi;
    if (density > kDiluteDensityLimit) {
        result.warning = "density rho/k^3 = " + std::to_string(density) +
                         " is not dilute; n = 1 + rho alpha / 2 is unreliable";
    }
    return result;
}

DephasingEstimate dephasing_estimate(Detuning delta, double kv_over_gamma, double ell,
                                     std::optional<double> density) {
    if (!(ell > 0.0)) {
        throw std::domain_error("dephasing_estimate: ell must be > 0");
    }
    double const rho = density.value_or(1.0 / (ell * cross_section(delta)));
    // d(n - 1)/d(delta) = 3 pi rho i dR/d(delta).
    Complex const dn = 3.0 * kPi * rho * Complex{0.0, 1.0} * slope_of_resonance(delta.value);
    DephasingEstimate est;
    est.scattering = scattering_phase_slope(delta) * kv_over_gamma;
    est.propagation = ell * dn.real() * kv_over_gamma;
    est.total = est.scattering + est.propagation;
    return est;
}

}  // namespace cbs
