#include "cqsphere/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace cqsphere {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_plane(const PlaneRotation& rot, Eigen::Index dim) {
  if (rot.i < 0 || rot.j <= rot.i || rot.j >= dim) {
    throw InvalidArgument("rotation plane (" + std::to_string(rot.i) + ", " +
                          std::to_string(rot.j) + ") invalid for dimension " +
                          std::to_string(dim));
  }
}

void rotate_in_place(AmbientVector& v, const PlaneRotation& rot) {
  check_plane(rot, v.size());
  const double c = std::cos(rot.angle);
  const double s = std::sin(rot.angle);
  const double a = v[rot.i];
  const double b = v[rot.j];
  v[rot.i] = c * a - s * b;
  v[rot.j] = s * a + c * b;
}

// T u − u. Rotations use c − 1 = −2 sin²(θ/2) so tiny moves keep their
// relative accuracy.
AmbientVector rotation_displacement(const AmbientVector& u, const PlaneRotation& rot) {
  check_plane(rot, u.size());
  const double h = std::sin(0.5 * rot.angle);
  const double cm1 = -2.0 * h * h;
  const double s = std::sin(rot.angle);
  AmbientVector d = AmbientVector::Zero(u.size());
  d[rot.i] = cm1 * u[rot.i] - s * u[rot.j];
  d[rot.j] = s * u[rot.i] + cm1 * u[rot.j];
  return d;
}

// (αa ⊕ (1−α)x) − x from a − x. The coefficient of x,
//   (sin αθ + sin (1−α)θ)/sin θ − 1 = (cos γ − cos(θ/2))/cos(θ/2),  γ = (2α−1)θ/2,
// is formed as a product of sines to avoid cancellation.
AmbientVector combine_displacement(double alpha, const AmbientVector& da,
                                   const AmbientVector& x) {
  const double chord = da.norm();
  if (chord == 0.0) return da;
  const double theta = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
  const double half = 0.5 * theta;
  const double gamma = (2.0 * alpha - 1.0) * half;
  const double coeff_x =
      2.0 * std::sin(0.5 * (half + gamma)) * std::sin(0.5 * (half - gamma)) / std::cos(half);
  return (std::sin(alpha * theta) / std::sin(theta)) * da + coeff_x * x;
}

AmbientVector map_displacement(const Mapping& map, const AmbientVector& u) {
  return std::visit(
      Overloaded{
          [&](const PlaneRotation& rot) { return rotation_displacement(u, rot); },
          [&](const RotationChain& chain) {
            AmbientVector v = u;
            AmbientVector total = AmbientVector::Zero(u.size());
            for (const PlaneRotation& rot : chain.factors) {
              const AmbientVector d = rotation_displacement(v, rot);
              total += d;
              rotate_in_place(v, rot);
            }
            return total;
          },
          [&](const GeodesicContraction& g) -> AmbientVector {
            return combine_displacement(g.beta, g.target.coords() - u, u);
          },
      },
      map);
}

// Null space of m, by SVD; singular values below tol count as zero.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double tol = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const Eigen::Index n = m.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > tol) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

SpherePoint apply_map(const Mapping& map, const SpherePoint& x) {
  return std::visit(
      Overloaded{
          [&](const PlaneRotation& rot) {
            AmbientVector v = x.coords();
            rotate_in_place(v, rot);
            return SpherePoint(std::move(v));
          },
          [&](const RotationChain& chain) {
            AmbientVector v = x.coords();
            for (const PlaneRotation& rot : chain.factors) rotate_in_place(v, rot);
            return SpherePoint(std::move(v));
          },
          [&](const GeodesicContraction& g) { return geodesic_combine(g.beta, g.target, x); },
      },
      map);
}

bool is_isometry(const Mapping& map) {
  return !std::holds_alternative<GeodesicContraction>(map);
}

Eigen::MatrixXd linear_matrix(const Mapping& map, Eigen::Index dim) {
  if (!is_isometry(map)) {
    throw InvalidArgument("mapping is not linear: " + describe(map));
  }
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    m.col(k) = apply_map(map, SpherePoint::basis(dim, k)).coords();
  }
  return m;
}

Eigen::MatrixXd fixed_set_basis(const Mapping& map, Eigen::Index dim) {
  return null_space(linear_matrix(map, dim) - Eigen::MatrixXd::Identity(dim, dim));
}

AlphaSchedule constant_schedule(std::vector<double> alphas) {
  return [alphas = std::move(alphas)](int) { return alphas; };
}

AlphaSchedule oscillating_schedule(std::size_t r, double amplitude) {
  return [r, amplitude](int n) {
    std::vector<double> out(r);
    for (std::size_t i = 0; i < r; ++i) {
      const bool even = (static_cast<std::size_t>(n) + i + 1) % 2 == 0;
      out[i] = 0.5 + (even ? amplitude : -amplitude);
    }
    return out;
  };
}

MappingFamily::MappingFamily(std::vector<Mapping> maps, std::vector<double> alphas,
                             double alpha_floor, bool experimental)
    : MappingFamily(std::move(maps), constant_schedule(alphas), alpha_floor, experimental) {
  validate(alphas);
}

MappingFamily::MappingFamily(std::vector<Mapping> maps, AlphaSchedule schedule,
                             double alpha_floor, bool experimental)
    : maps_(std::move(maps)),
      schedule_(std::move(schedule)),
      alpha_floor_(alpha_floor),
      experimental_(experimental) {
  if (maps_.empty()) {
    throw InvalidArgument("mapping family needs at least one map");
  }
  if (!(alpha_floor_ > 0.0 && alpha_floor_ < 0.5)) {
    throw InvalidArgument("alpha floor must lie in (0, 1/2)");
  }
  if (!experimental_) {
    for (const Mapping& m : maps_) {
      if (!is_isometry(m)) {
        throw InvalidArgument("non-isometric map requires the experimental flag: " + describe(m));
      }
    }
  }
  if (!schedule_) {
    throw InvalidArgument("mapping family needs a weight schedule");
  }
}

void MappingFamily::validate(const std::vector<double>& alphas) const {
  if (alphas.size() != maps_.size()) {
    throw InvalidArgument("expected " + std::to_string(maps_.size()) + " weights, got " +
                          std::to_string(alphas.size()));
  }
  for (double a : alphas) {
    if (!(a >= alpha_floor_ && a <= 1.0 - alpha_floor_)) {
      std::ostringstream msg;
      msg << "weight " << a << " outside [" << alpha_floor_ << ", " << 1.0 - alpha_floor_ << "]";
      throw InvalidArgument(msg.str());
    }
  }
}

std::vector<double> MappingFamily::alphas(int n) const {
  std::vector<double> row = schedule_(n);
  validate(row);
  return row;
}

void MappingFamily::verify_cap_invariance(const SpherePoint& pole, double radius, int samples,
                                          std::uint64_t seed) const {
  const double cos_radius = std::cos(radius);
  SphereSampler sampler(seed);
  for (int s = 0; s < samples; ++s) {
    const SpherePoint z = sampler.point_in_cap(pole, radius);
    for (const Mapping& m : maps_) {
      if (apply_map(m, z).coords().dot(pole.coords()) < cos_radius - 1e-12) {
        throw InvalidArgument("map does not preserve the cap: " + describe(m));
      }
    }
  }
}

Eigen::MatrixXd MappingFamily::common_fixed_basis(Eigen::Index dim) const {
  Eigen::MatrixXd stacked(dim * static_cast<Eigen::Index>(maps_.size()), dim);
  for (std::size_t k = 0; k < maps_.size(); ++k) {
    stacked.middleRows(static_cast<Eigen::Index>(k) * dim, dim) =
        linear_matrix(maps_[k], dim) - Eigen::MatrixXd::Identity(dim, dim);
  }
  return null_space(stacked);
}

WEvaluation evaluate_w(const MappingFamily& family, const SpherePoint& x, int n) {
  const std::vector<double> alphas = family.alphas(n);
  WEvaluation out;
  out.stages.reserve(family.size());
  AmbientVector disp = AmbientVector::Zero(x.dim());
  for (std::size_t k = 0; k < family.size(); ++k) {
    // The second argument of ⊕ is always the stage-0 input x, so the stages
    // are carried as offsets from x.
    const AmbientVector u = k == 0 ? x.coords() : out.stages.back().coords();
    const AmbientVector moved = disp + map_displacement(family.map(k), u);
    if (moved.squaredNorm() >= 4.0 - 2.0 * kAntipodalTolerance) {
      throw AntipodalPoints("W-mapping stage is antipodal to its input");
    }
    disp = combine_displacement(alphas[k], moved, x.coords());
    out.stages.emplace_back(x.coords() + disp);
  }
  out.displacement = std::move(disp);
  return out;
}

std::vector<double> residuals(const MappingFamily& family, const SpherePoint& x) {
  std::vector<double> out;
  out.reserve(family.size());
  for (const Mapping& m : family.maps()) {
    out.push_back(distance(apply_map(m, x), x));
  }
  return out;
}

std::string describe(const Mapping& map) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const PlaneRotation& r) {
                   out << "rotation(" << r.i + 1 << "," << r.j + 1 << "," << r.angle << ")";
                 },
                 [&](const RotationChain& c) {
                   if (c.factors.empty()) {
                     out << "identity";
                     return;
                   }
                   out << "chain[";
                   for (std::size_t k = 0; k < c.factors.size(); ++k) {
                     const PlaneRotation& r = c.factors[k];
                     out << (k ? ";" : "") << r.i + 1 << "," << r.j + 1 << "," << r.angle;
                   }
                   out << "]";
                 },
                 [&](const GeodesicContraction& g) { out << "contraction(beta=" << g.beta << ")"; },
             },
             map);
  return out.str();
}

}  // namespace cqsphere
