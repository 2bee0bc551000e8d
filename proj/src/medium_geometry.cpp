#include "cbs/medium_geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "cbs/resonance_optics.hpp"

namespace cbs {

namespace {
constexpr double kBoundaryTolerance = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

Ray::Ray(Vec3 o, Vec3 d) : origin(o), direction(d) {
    double const len = norm(d);
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw std::domain_error("ray direction must be a finite nonzero vector");
    }
    if (std::abs(len - 1.0) > 1e-12) {
        direction = d * (1.0 / len);
    }
}

GeometryKind parse_geometry_kind(std::string const& text) {
    if (text == "slab") return GeometryKind::Slab;
    if (text == "sphere") return GeometryKind::Sphere;
    throw std::invalid_argument("unknown geometry kind '" + text + "' (expected slab|sphere)");
}

std::string to_string(GeometryKind kind) { return kind == GeometryKind::Slab ? "slab" : "sphere"; }

MediumGeometry::MediumGeometry(std::variant<SemiInfiniteSlab, UniformSphere> shape, double ell0)
    : shape_(shape), ell0_(ell0), density_(1.0 / (kSigma0 * ell0)) {}

MediumGeometry MediumGeometry::slab(double k_ell0) {
    if (!(k_ell0 > 0.0) || !std::isfinite(k_ell0)) {
        throw std::domain_error("k_ell0 must be finite and > 0");
    }
    return {SemiInfiniteSlab{}, k_ell0};
}

MediumGeometry MediumGeometry::sphere(double b, double k_ell0) {
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw std::domain_error("sphere optical thickness b must be finite and > 0");
    }
    if (!(k_ell0 > 0.0) || !std::isfinite(k_ell0)) {
        throw std::domain_error("k_ell0 must be finite and > 0");
    }
    return {UniformSphere{0.5 * b * k_ell0}, k_ell0};
}

GeometryKind MediumGeometry::kind() const {
    return std::holds_alternative<SemiInfiniteSlab>(shape_) ? GeometryKind::Slab : GeometryKind::Sphere;
}

double MediumGeometry::optical_thickness() const {
    return std::visit(overloaded{[](SemiInfiniteSlab) { return std::numeric_limits<double>::infinity(); },
                                 [&](UniformSphere s) { return 2.0 * s.radius * density_ * kSigma0; }},
                      shape_);
}

Ray MediumGeometry::entry_ray() const {
    return std::visit(overloaded{[](SemiInfiniteSlab) { return Ray{{0, 0, 0}, {0, 0, 1}}; },
                                 [](UniformSphere s) { return Ray{{0, 0, -s.radius}, {0, 0, 1}}; }},
                      shape_);
}

bool MediumGeometry::contains(Vec3 const& p) const {
    return std::visit(
        overloaded{[&](SemiInfiniteSlab) { return p.z >= -kBoundaryTolerance * ell0_; },
                   [&](UniformSphere s) { return dot(p, p) <= s.radius * s.radius * (1.0 + kBoundaryTolerance); }},
        shape_);
}

double MediumGeometry::distance_to_boundary(Ray const& ray) const {
    if (!contains(ray.origin)) {
        throw std::domain_error("distance_to_boundary: ray origin is outside the medium");
    }
    return std::visit(overloaded{[&](SemiInfiniteSlab) {
                                     if (ray.direction.z >= 0.0) {
                                         return std::numeric_limits<double>::infinity();
                                     }
                                     return std::max(ray.origin.z, 0.0) / -ray.direction.z;
                                 },
                                 [&](UniformSphere s) {
                                     double const b = dot(ray.origin, ray.direction);
                                     double const c = dot(ray.origin, ray.origin) - s.radius * s.radius;
                                     double const disc = std::max(b * b - c, 0.0);
                                     return std::max(-b + std::sqrt(disc), 0.0);
                                 }},
                      shape_);
}

double optical_depth_to_boundary(MediumGeometry const& geom, Ray const& ray, double ell) {
    return geom.distance_to_boundary(ray) / ell;
}

StepResult sample_step(MediumGeometry const& geom, Ray const& ray, double ell, RandomStream& rng) {
    StepResult step;
    step.length = -ell * std::log(rng.uniform_open_zero());
    if (step.length >= geom.distance_to_boundary(ray)) {
        step.escaped = true;
        return step;
    }
    step.point = ray.origin + step.length * ray.direction;
    return step;
}

Vec3 sample_isotropic_direction(RandomStream& rng) {
    double const mu = 2.0 * rng.uniform() - 1.0;
    double const phi = 2.0 * kPi * rng.uniform();
    double const s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    return {s * std::cos(phi), s * std::sin(phi), mu};
}

}  // namespace cbs
