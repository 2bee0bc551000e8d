#pragma once

#include <limits>
#include <string>
#include <variant>

#include "cbs/random.hpp"
#include "cbs/vec3.hpp"

namespace cbs {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length

    Ray(Vec3 o, Vec3 d);
};

/// Uniform medium filling z > 0; light enters through the plane z = 0.
struct SemiInfiniteSlab {};

/// Uniform ball of given radius centred at the origin.
struct UniformSphere {
    double radius = 0.0;
};

enum class GeometryKind { Slab, Sphere };

GeometryKind parse_geometry_kind(std::string const& text);
std::string to_string(GeometryKind kind);

/**
 * Homogeneous scattering cloud. Parameterized by the resonant static mean
 * free path ell0 (density rho = 1 / (sigma0 ell0)) and, for the sphere, the
 * optical thickness b = 2 R / ell0 along a diameter.
 */
class MediumGeometry {
  public:
    static MediumGeometry slab(double k_ell0);
    static MediumGeometry sphere(double b, double k_ell0);

    GeometryKind kind() const;
    double ell0() const { return ell0_; }
    double density() const { return density_; }
    // b recomputed from density and size at resonance for static atoms.
    double optical_thickness() const;

    // Entry ray of the probe: normal incidence on the slab, along a diameter
    // of the sphere.
    Ray entry_ray() const;

    bool contains(Vec3 const& p) const;
    double distance_to_boundary(Ray const& ray) const;

    std::variant<SemiInfiniteSlab, UniformSphere> const& shape() const { return shape_; }

  private:
    MediumGeometry(std::variant<SemiInfiniteSlab, UniformSphere> shape, double ell0);

    std::variant<SemiInfiniteSlab, UniformSphere> shape_;
    double ell0_ = 1.0;
    double density_ = 0.0;
};

double optical_depth_to_boundary(MediumGeometry const& geom, Ray const& ray, double ell);

struct StepResult {
    bool escaped = false;
    double length = 0.0;  // sampled free path (may exceed the boundary distance)
    Vec3 point;           // valid when !escaped
};

/// Exponential free path of mean ell from the ray origin; escape if it leaves the medium.
StepResult sample_step(MediumGeometry const& geom, Ray const& ray, double ell, RandomStream& rng);

Vec3 sample_isotropic_direction(RandomStream& rng);

}  // namespace cbs
