#include "cqsphere/oracle.hpp"

#include <cmath>
#include <numbers>

namespace cqsphere::oracle {

namespace {

// Two unit vectors completing `p` to an orthonormal frame of R³.
std::pair<AmbientVector, AmbientVector> tangent_frame(const AmbientVector& p) {
  Eigen::Index k = 0;
  p.cwiseAbs().minCoeff(&k);
  AmbientVector a = AmbientVector::Unit(3, k);
  a -= a.dot(p) * p;
  a.normalize();
  AmbientVector b(3);
  b << p[1] * a[2] - p[2] * a[1], p[2] * a[0] - p[0] * a[2], p[0] * a[1] - p[1] * a[0];
  return {a, b};
}

void require_two_sphere(const SpherePoint& p) {
  if (p.dim() != 3) {
    throw InvalidArgument("grid oracle only works on the 2-sphere (ambient dimension 3)");
  }
}

}  // namespace

GeodesicGrid cap_grid(const SpherePoint& pole, double radius, double h) {
  require_two_sphere(pole);
  if (!(h > 0.0)) throw InvalidArgument("grid resolution must be positive");
  const auto [a, b] = tangent_frame(pole.coords());
  GeodesicGrid grid;
  grid.resolution = h;
  grid.points.push_back(pole);
  const int rings = static_cast<int>(std::ceil(radius / h));
  for (int ring = 1; ring <= rings; ++ring) {
    const double phi = radius * ring / rings;
    const int count = std::max(1, static_cast<int>(std::ceil(2 * std::numbers::pi * std::sin(phi) / h)));
    for (int k = 0; k < count; ++k) {
      const double psi = 2 * std::numbers::pi * k / count;
      grid.points.emplace_back(std::cos(phi) * pole.coords() +
                               std::sin(phi) * (std::cos(psi) * a + std::sin(psi) * b));
    }
  }
  return grid;
}

SpherePoint brute_project(const Region& r, const SpherePoint& x, double h) {
  require_two_sphere(x);
  const GeodesicGrid grid = cap_grid(r.pole(), r.radius(), h);
  const SpherePoint* best = nullptr;
  double best_dot = -2.0;
  for (const SpherePoint& z : grid.points) {
    if (!contains(r, z, 0.0)) continue;
    const double dot = z.coords().dot(x.coords());
    if (dot > best_dot) {
      best_dot = dot;
      best = &z;
    }
  }
  if (best == nullptr) {
    throw NoFeasibleGridPoint("no grid point satisfies the region; reduce the resolution");
  }

  // Local pass on a gnomonic grid around the coarse winner.
  const AmbientVector center = best->coords();
  const auto [a, b] = tangent_frame(center);
  const double fine = h / 100.0;
  const int half = 300;  // covers ±3h
  AmbientVector best_fine = center;
  for (int i = -half; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      AmbientVector z = center + (i * fine) * a + (j * fine) * b;
      z.normalize();
      if (r.cap().slack(z) < 0.0) continue;
      bool feasible = true;
      for (const Halfspace& hs : r.linear()) {
        if (hs.slack(z) < 0.0) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      const double dot = z.dot(x.coords());
      if (dot > best_dot) {
        best_dot = dot;
        best_fine = z;
      }
    }
  }

  // A 2-D grid pins the answer down only to about sqrt(resolution) along a
  // constraint boundary, where the distance to x varies quadratically. The
  // boundary curves are therefore also sampled directly at the fine spacing.
  auto consider = [&](const AmbientVector& z) {
    if (!contains(r, SpherePoint(z), 1e-12)) return;
    const double dot = z.dot(x.coords());
    if (dot > best_dot) {
      best_dot = dot;
      best_fine = z;
    }
  };
  const AmbientVector& p = r.pole().coords();
  const auto [pa, pb] = tangent_frame(p);
  const double c = std::cos(r.radius()), s = std::sin(r.radius());
  const int cap_count = static_cast<int>(std::ceil(2 * std::numbers::pi * s / fine));
  for (int k = 0; k < cap_count; ++k) {
    const double psi = 2 * std::numbers::pi * k / cap_count;
    consider(c * p + s * (std::cos(psi) * pa + std::sin(psi) * pb));
  }
  const int circle_count = static_cast<int>(std::ceil(2 * std::numbers::pi / fine));
  for (const Halfspace& hs : r.linear()) {
    const auto [u, v] = tangent_frame(hs.normal());
    for (int k = 0; k < circle_count; ++k) {
      const double t = 2 * std::numbers::pi * k / circle_count;
      const AmbientVector z = std::cos(t) * u + std::sin(t) * v;
      if (z.dot(p) >= c - 1e-12) consider(z);
    }
  }
  return SpherePoint(best_fine);
}

SpherePoint subspace_project(const SpherePoint& x, const Eigen::MatrixXd& basis) {
  if (basis.rows() != x.dim()) throw InvalidArgument("basis dimension mismatch");
  const AmbientVector v = basis * (basis.transpose() * x.coords());
  if (v.norm() <= 1e-12) {
    throw DegenerateInput("point is orthogonal to the target subspace");
  }
  return SpherePoint(v);
}

SpherePoint circle_project(const SpherePoint& x, std::pair<Eigen::Index, Eigen::Index> kept_axes) {
  const auto [i, j] = kept_axes;
  if (i < 0 || j < 0 || i >= x.dim() || j >= x.dim() || i == j) {
    throw InvalidArgument("kept axes out of range");
  }
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(x.dim(), 2);
  basis(i, 0) = 1.0;
  basis(j, 1) = 1.0;
  return subspace_project(x, basis);
}

SpherePoint cap_project(const SpherePoint& pole, double radius, const SpherePoint& x) {
  const double d = distance(pole, x);
  if (d <= radius) return x;
  // Point at distance `radius` from the pole along [pole, x].
  return geodesic_combine(radius / d, x, pole);
}

bool sin_lemma_check(const std::vector<double>& delta_grid, double alpha) {
  for (double delta : delta_grid) {
    if (!(std::sin(delta) < std::sin(alpha * delta) + std::sin((1.0 - alpha) * delta))) {
      return false;
    }
  }
  return true;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace cqsphere::oracle
