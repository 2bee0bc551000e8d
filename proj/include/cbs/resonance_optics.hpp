#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cbs/vec3.hpp"
#include "cbs/velocity_model.hpp"

// Internal units: Gamma = 1 (full resonance width), k = 1. Lengths are in 1/k,
// densities in k^3, detunings in Gamma.
namespace cbs {

inline constexpr double kPi = std::numbers::pi;
// Resonant cross-section 6 pi / k^2.
inline constexpr double kSigma0 = 6.0 * kPi;

/// Laser-minus-atom angular frequency, in units of Gamma.
struct Detuning {
    double value = 0.0;
    constexpr explicit Detuning(double v) : value(v) {}
};

/// R = (i/2) / (delta + i/2). Its argument is the scattering phase shift.
inline Complex resonance_factor(Detuning delta) {
    return Complex{0.0, 0.5} / Complex{delta.value, 0.5};
}

/// alpha = -3 pi / (delta + i/2) = (6 pi) i R, in units of k^-3.
inline Complex polarizability(Detuning delta) { return -3.0 * kPi / Complex{delta.value, 0.5}; }

/// sigma = k Im alpha = sigma0 / (1 + 4 delta^2), in units of k^-2.
inline double cross_section(Detuning delta) {
    return kSigma0 / (1.0 + 4.0 * delta.value * delta.value);
}

/// d(arg R)/d(delta) = (1/2) / (delta^2 + 1/4). Positive: a Wigner delay.
inline double scattering_phase_slope(Detuning delta) {
    return 0.5 / (delta.value * delta.value + 0.25);
}

/// Gauss-Hermite rule for weight exp(-x^2).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_hermite(int n);

/**
 * Velocity-averaged resonance factor chi(delta) = < R(delta - u) >_u, where u
 * is the projection of the atomic velocity on the propagation axis.
 *
 * Static atoms and Lorentz-like velocities have closed forms (a Lorentzian
 * convolved with a Lorentzian stays Lorentzian with summed widths). Gaussian
 * velocities use 64-node Gauss-Hermite when the Doppler width is small enough
 * for it to converge, and adaptive Gauss-Kronrod otherwise.
 *
 * tabulate() caches chi on a uniform grid with cubic Hermite interpolation for
 * the Monte-Carlo inner loop; fast() falls back to the exact path outside the
 * table.
 */
class ConvolvedResponse {
  public:
    explicit ConvolvedResponse(VelocityDistribution dist = {});

    Complex operator()(double delta) const;
    Complex derivative(double delta) const;

    void tabulate(double lo, double hi);
    bool tabulated() const { return !table_.empty(); }
    Complex fast(double delta) const;

    VelocityDistribution const& distribution() const { return dist_; }

  private:
    enum class Method { Exact, Quadrature };
    struct Sample {
        Complex value;
        Complex slope;
    };

    Sample evaluate(double delta) const;

    VelocityDistribution dist_;
    Method method_ = Method::Exact;
    QuadratureRule rule_;
    double table_lo_ = 0.0;
    double table_step_ = 0.0;
    std::vector<Sample> table_;
};

/// Mean free path 1 / (rho <sigma>) for density rho (in k^3).
double mean_free_path(double density, Detuning delta, VelocityDistribution const& dist);

struct EffectiveIndex {
    Complex n;
    double density = 0.0;
    // Set when rho/k^3 is not small; the dilute formula is still returned.
    std::optional<std::string> warning;
};

/// n = 1 + (rho/2) <alpha>.
EffectiveIndex effective_index(double density, Detuning delta, VelocityDistribution const& dist);

inline constexpr double kDiluteDensityLimit = 1e-2;

struct DephasingEstimate {
    double scattering = 0.0;   // dPhi_s/domega * kv
    double propagation = 0.0;  // k ell dn/domega * kv
    double total = 0.0;
};

/**
 * Phase difference between reversed paths induced by a frequency offset kv,
 * for static-atom optics. When density is omitted it is chosen so that the
 * mean free path at this detuning equals ell.
 */
DephasingEstimate dephasing_estimate(Detuning delta, double kv_over_gamma, double ell,
                                     std::optional<double> density = std::nullopt);

}  // namespace cbs
