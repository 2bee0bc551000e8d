#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "cbs/random.hpp"
#include "cbs/vec3.hpp"

namespace cbs {

enum class VelocityKind { Static, Gaussian, LorentzLike };

/**
 * Atomic velocity distribution, in units of Gamma/k.
 *
 * The reported velocity label v is the 1D rms velocity for the Gaussian case.
 * For the Lorentz-like case it is the relabelled FWHM, v = v0 / sqrt(8 ln 2);
 * the distribution itself is an isotropic 3D Cauchy whose 1D marginals are
 * Lorentzians of half width gamma_v = v0 / 2. It has no finite variance, so v
 * is only a label there.
 */
class VelocityDistribution {
  public:
    VelocityDistribution() = default;

    static VelocityDistribution static_atoms() { return {}; }
    static VelocityDistribution gaussian(double rms);
    static VelocityDistribution lorentz_like_from_label(double v_label);
    static VelocityDistribution lorentz_like_from_fwhm(double v0);

    VelocityKind kind() const { return kind_; }
    // kv/Gamma label as configured.
    double label() const { return label_; }
    // Gaussian: 1D standard deviation. LorentzLike: Cauchy half width gamma_v.
    double scale() const { return scale_; }
    double fwhm() const;
    bool is_static() const { return kind_ == VelocityKind::Static || scale_ == 0.0; }

    std::string name() const;

  private:
    VelocityDistribution(VelocityKind kind, double label, double scale)
        : kind_(kind), label_(label), scale_(scale) {}

    VelocityKind kind_ = VelocityKind::Static;
    double label_ = 0.0;
    double scale_ = 0.0;
};

// sqrt(8 ln 2): ratio between FWHM and rms of a Gaussian.
inline double const kFwhmOverRms = std::sqrt(8.0 * std::log(2.0));

VelocityKind parse_velocity_kind(std::string const& text);
std::string to_string(VelocityKind kind);

Vec3 sample_velocity(VelocityDistribution const& dist, RandomStream& rng);

/// Lab-frame angular frequency change (k_out - k_in) . v for one scattering.
inline double doppler_shift(Vec3 const& k_in, Vec3 const& k_out, Vec3 const& vel) {
    return dot(k_out - k_in, vel);
}

/// Detuning seen in the atom rest frame: (omega_lab - omega_0) - k_in . v.
inline double rest_frame_detuning(double lab_detuning, Vec3 const& k_in, Vec3 const& vel) {
    return lab_detuning - dot(k_in, vel);
}

}  // namespace cbs
