#include "cqsphere/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cqsphere {

SpherePoint::SpherePoint(AmbientVector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw InvalidArgument("sphere point needs ambient dimension >= 2");
  }
  if (!coords_.allFinite()) {
    throw InvalidArgument("sphere point has non-finite coordinates");
  }
  const double norm = coords_.norm();
  if (!(norm > 1e-300)) {
    throw InvalidArgument("cannot normalize the zero vector onto the sphere");
  }
  coords_ /= norm;
}

SpherePoint SpherePoint::basis(Eigen::Index dim, Eigen::Index i) {
  if (i < 0 || i >= dim) {
    throw InvalidArgument("basis index out of range");
  }
  return SpherePoint(AmbientVector::Unit(dim, i));
}

double inner(const SpherePoint& x, const SpherePoint& y) {
  return std::clamp(x.coords().dot(y.coords()), -1.0, 1.0);
}

double distance(const SpherePoint& x, const SpherePoint& y) {
  const double chord = (x.coords() - y.coords()).norm();
  const double cochord = (x.coords() + y.coords()).norm();
  return 2.0 * std::atan2(chord, cochord);
}

SpherePoint geodesic_combine(double alpha, const SpherePoint& x, const SpherePoint& y) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InvalidArgument("geodesic weight must lie in [0, 1]");
  }
  if (inner(x, y) <= -1.0 + kAntipodalTolerance) {
    throw AntipodalPoints("geodesic between antipodal points is not unique");
  }
  const double theta = distance(x, y);
  if (theta == 0.0 || alpha == 1.0) {
    return x;
  }
  if (alpha == 0.0) {
    return y;
  }
  const double s = std::sin(theta);
  AmbientVector z = (std::sin(alpha * theta) / s) * x.coords() +
                    (std::sin((1.0 - alpha) * theta) / s) * y.coords();
  return SpherePoint(std::move(z));
}

double pal_inequality_gap(double t, const SpherePoint& x, const SpherePoint& y,
                          const SpherePoint& z) {
  const double dxy = distance(x, y);
  const double dyz = distance(y, z);
  const double dzx = distance(z, x);
  if (dxy + dyz + dzx >= 2.0 * std::numbers::pi) {
    throw PerimeterTooLarge("triangle perimeter must be below 2*pi");
  }
  const SpherePoint v = geodesic_combine(t, x, y);
  const double lhs = std::cos(distance(v, z)) * std::sin(dxy);
  const double rhs = std::cos(dzx) * std::sin(t * dxy) + std::cos(dyz) * std::sin((1.0 - t) * dxy);
  return lhs - rhs;
}

SpherePoint SphereSampler::uniform(Eigen::Index dim) {
  std::normal_distribution<double> gauss;
  AmbientVector v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(engine_);
  } while (v.norm() < 1e-8);
  return SpherePoint(std::move(v));
}

double SphereSampler::real(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

SpherePoint SphereSampler::point_in_cap(const SpherePoint& center, double rho) {
  const Eigen::Index dim = center.dim();
  if (!(rho > 0.0)) {
    return center;
  }
  rho = std::min(rho, std::numbers::pi);

  // Tangent direction: a Gaussian vector with its radial component removed.
  std::normal_distribution<double> gauss;
  AmbientVector tangent(dim);
  double tnorm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) tangent[i] = gauss(engine_);
    tangent -= tangent.dot(center.coords()) * center.coords();
    tnorm = tangent.norm();
  } while (tnorm < 1e-8);
  tangent /= tnorm;

  // Polar angle with density proportional to sin^(dim-2), by rejection.
  const double sin_max = std::sin(std::min(rho, std::numbers::pi / 2));
  std::uniform_real_distribution<double> unit;
  double phi = 0.0;
  for (;;) {
    phi = rho * unit(engine_) * (1.0 - 1e-12);
    const double accept = std::pow(std::sin(phi) / sin_max, static_cast<double>(dim - 2));
    if (unit(engine_) <= accept) break;
  }
  return SpherePoint(std::cos(phi) * center.coords() + std::sin(phi) * tangent);
}

SpherePoint random_point_in_cap(const SpherePoint& center, double rho, std::uint64_t seed) {
  SphereSampler sampler(seed);
  return sampler.point_in_cap(center, rho);
}

}  // namespace cqsphere
