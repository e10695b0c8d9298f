#pragma once

// Geometry kernel for the unit sphere of a finite-dimensional real inner
// product space: the angular metric, spherical linear interpolation and the
// CAT(1) comparison inequality.

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "cqsphere/errors.hpp"

namespace cqsphere {

using AmbientVector = Eigen::VectorXd;

/// Tolerance below which ⟨x,y⟩ + 1 is treated as an antipodal pair.
inline constexpr double kAntipodalTolerance = 1e-12;

/// A unit vector. The constructor renormalizes its input, so every instance
/// satisfies | ‖coords‖ − 1 | ≤ 1e−12.
class SpherePoint {
 public:
  /// Throws InvalidArgument for dimension < 2, non-finite coordinates or a
  /// (numerically) zero vector.
  explicit SpherePoint(AmbientVector coords);

  /// The i-th standard basis vector of R^dim (0-based index).
  static SpherePoint basis(Eigen::Index dim, Eigen::Index i);

  const AmbientVector& coords() const noexcept { return coords_; }
  Eigen::Index dim() const noexcept { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }

  SpherePoint operator-() const { return SpherePoint(-coords_); }

 private:
  AmbientVector coords_;
};

/// Ambient inner product clamped to [−1, 1].
double inner(const SpherePoint& x, const SpherePoint& y);

/// Geodesic distance arccos⟨x,y⟩ in [0, π].
///
/// Evaluated as 2·atan2(‖x−y‖, ‖x+y‖), which equals arccos⟨x,y⟩ for unit
/// vectors but keeps full relative precision for nearby points, where
/// arccos(1 − ε) has an error floor around 1e−8.
double distance(const SpherePoint& x, const SpherePoint& y);

/// The point αx ⊕ (1−α)y on the geodesic [x,y] with d(y,z) = α·d(x,y) and
/// d(x,z) = (1−α)·d(x,y). Returns x when the points coincide.
/// Throws AntipodalPoints when ⟨x,y⟩ ≤ −1 + 1e−12.
SpherePoint geodesic_combine(double alpha, const SpherePoint& x, const SpherePoint& y);

/// LHS − RHS of the CAT(1) comparison inequality
///   cos d(v,z)·sin d(x,y) ≥ cos d(x,z)·sin(t·d(x,y)) + cos d(y,z)·sin((1−t)·d(x,y))
/// with v = t·x ⊕ (1−t)·y. Non-negative on the sphere up to rounding.
/// Throws PerimeterTooLarge when d(x,y) + d(y,z) + d(z,x) ≥ 2π.
double pal_inequality_gap(double t, const SpherePoint& x, const SpherePoint& y,
                          const SpherePoint& z);

/// Deterministic sampler of points on the sphere. Draws from the uniform
/// (surface) distribution restricted to a cap.
class SphereSampler {
 public:
  explicit SphereSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform point on the whole sphere of R^dim.
  SpherePoint uniform(Eigen::Index dim);
  /// Uniform point in the closed cap {z : d(z, center) ≤ rho}.
  SpherePoint point_in_cap(const SpherePoint& center, double rho);
  /// Uniform real in [lo, hi).
  double real(double lo, double hi);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// One sample from SphereSampler(seed).point_in_cap(center, rho).
SpherePoint random_point_in_cap(const SpherePoint& center, double rho, std::uint64_t seed);

}  // namespace cqsphere
