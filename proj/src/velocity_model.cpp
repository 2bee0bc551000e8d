#include "cbs/velocity_model.hpp"

#include <random>
#include <stdexcept>

namespace cbs {

VelocityDistribution VelocityDistribution::gaussian(double rms) {
    if (!(rms >= 0.0) || !std::isfinite(rms)) {
        throw std::domain_error("gaussian velocity rms must be finite and >= 0");
    }
    return {VelocityKind::Gaussian, rms, rms};
}

VelocityDistribution VelocityDistribution::lorentz_like_from_label(double v_label) {
    if (!(v_label >= 0.0) || !std::isfinite(v_label)) {
        throw std::domain_error("lorentz velocity label must be finite and >= 0");
    }
    return {VelocityKind::LorentzLike, v_label, 0.5 * kFwhmOverRms * v_label};
}

VelocityDistribution VelocityDistribution::lorentz_like_from_fwhm(double v0) {
    return lorentz_like_from_label(v0 / kFwhmOverRms);
}

double VelocityDistribution::fwhm() const {
    switch (kind_) {
        case VelocityKind::Static: return 0.0;
        case VelocityKind::Gaussian: return kFwhmOverRms * scale_;
        case VelocityKind::LorentzLike: return 2.0 * scale_;
    }
    return 0.0;
}

std::string VelocityDistribution::name() const { return to_string(kind_); }

VelocityKind parse_velocity_kind(std::string const& text) {
    if (text == "static") return VelocityKind::Static;
    if (text == "gaussian") return VelocityKind::Gaussian;
    if (text == "lorentz") return VelocityKind::LorentzLike;
    throw std::invalid_argument("unknown velocity kind '" + text + "' (expected static|gaussian|lorentz)");
}

std::string to_string(VelocityKind kind) {
    switch (kind) {
        case VelocityKind::Static: return "static";
        case VelocityKind::Gaussian: return "gaussian";
        case VelocityKind::LorentzLike: return "lorentz";
    }
    return "static";
}

Vec3 sample_velocity(VelocityDistribution const& dist, RandomStream& rng) {
    if (dist.is_static()) {
        return {};
    }
    std::normal_distribution<double> normal;
    Vec3 g{normal(rng), normal(rng), normal(rng)};
    if (dist.kind() == VelocityKind::Gaussian) {
        return g * dist.scale();
    }
    // Multivariate Cauchy: normal vector over |independent normal|.
    double const denom = std::abs(normal(rng));
    return g * (dist.scale() / denom);
}

}  // namespace cbs
