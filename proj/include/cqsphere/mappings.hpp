#pragma once

// Nonexpansive self-maps of the sphere and the W-mapping combinator.
//
// The certified maps are linear isometries (coordinate-plane rotations and
// their compositions), so nonexpansiveness is exact and the fixed set of each
// map is the unit sphere of a computable subspace.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "cqsphere/sphere.hpp"

namespace cqsphere {

/// Rotation by `angle` radians in the coordinate plane (i, j), 0-based, i < j:
///   x_i' = cos·x_i − sin·x_j,  x_j' = sin·x_i + cos·x_j.
struct PlaneRotation {
  Eigen::Index i = 0;
  Eigen::Index j = 1;
  double angle = 0.0;
};

/// Composition of plane rotations, applied front to back. Empty is the identity.
struct RotationChain {
  std::vector<PlaneRotation> factors;
};

/// x ↦ β·target ⊕ (1−β)·x. Quasinonexpansive with fixed point `target`; not
/// an isometry, so families using it must opt in as experimental.
struct GeodesicContraction {
  SpherePoint target;
  double beta = 0.5;
};

using Mapping = std::variant<PlaneRotation, RotationChain, GeodesicContraction>;

inline Mapping identity_map() { return RotationChain{}; }

SpherePoint apply_map(const Mapping& map, const SpherePoint& x);

/// True for the linear isometries (rotations and chains).
bool is_isometry(const Mapping& map);

/// Matrix of a linear mapping on R^dim. Throws InvalidArgument for
/// non-linear maps.
Eigen::MatrixXd linear_matrix(const Mapping& map, Eigen::Index dim);

/// Orthonormal basis (as columns) of {v : Rv = v} for a linear mapping.
Eigen::MatrixXd fixed_set_basis(const Mapping& map, Eigen::Index dim);

/// Weights α_{n,1..r} used by the W-mapping at iteration n (n ≥ 1).
using AlphaSchedule = std::function<std::vector<double>(int n)>;

AlphaSchedule constant_schedule(std::vector<double> alphas);

/// Weights 1/2 + amplitude·(−1)^(n+i), alternating between iterations.
AlphaSchedule oscillating_schedule(std::size_t r, double amplitude);

/// T_1..T_r with weights α_{n,i} ∈ [a, 1−a], 0 < a < 1/2.
class MappingFamily {
 public:
  /// Constant weights. Throws InvalidArgument on r = 0, a size mismatch,
  /// weights outside [a, 1−a] or a non-isometric map without `experimental`.
  MappingFamily(std::vector<Mapping> maps, std::vector<double> alphas, double alpha_floor = 0.25,
                bool experimental = false);

  /// Weights drawn from a schedule; every row is validated when requested.
  MappingFamily(std::vector<Mapping> maps, AlphaSchedule schedule, double alpha_floor = 0.25,
                bool experimental = false);

  std::size_t size() const noexcept { return maps_.size(); }
  const std::vector<Mapping>& maps() const noexcept { return maps_; }
  const Mapping& map(std::size_t i) const { return maps_.at(i); }
  double alpha_floor() const noexcept { return alpha_floor_; }
  bool experimental() const noexcept { return experimental_; }

  /// Weights for iteration n, validated against [a, 1−a].
  std::vector<double> alphas(int n) const;

  /// Checks that every map sends `samples` seeded cap points back into the
  /// cap. Throws InvalidArgument naming the first offending map.
  void verify_cap_invariance(const SpherePoint& pole, double radius, int samples = 1000,
                             std::uint64_t seed = 7) const;

  /// Orthonormal basis of the common fixed subspace ∩ker(R_i − I). Only
  /// defined for families of linear maps.
  Eigen::MatrixXd common_fixed_basis(Eigen::Index dim) const;

 private:
  void validate(const std::vector<double>& alphas) const;

  std::vector<Mapping> maps_;
  AlphaSchedule schedule_;
  double alpha_floor_;
  bool experimental_;
};

/// Stage outputs U_1 x, …, U_r x of a W-mapping; the last one is W x.
struct WEvaluation {
  std::vector<SpherePoint> stages;
  /// W x − x, accumulated stage by stage without subtracting nearby unit
  /// vectors, so its direction stays accurate when W x is very close to x.
  AmbientVector displacement;
  const SpherePoint& result() const { return stages.back(); }
};

/// Stages of the W-mapping generated by `family` with weight row n.
WEvaluation evaluate_w(const MappingFamily& family, const SpherePoint& x, int n = 1);

/// The W-mapping generated by a family:
///   U_0 = I,  U_k = α_k·T_k U_{k−1} ⊕ (1−α_k)·I,  W = U_r.
class WMapping {
 public:
  explicit WMapping(MappingFamily family) : family_(std::move(family)) {}

  const MappingFamily& family() const noexcept { return family_; }

  /// W_n x with weights from row n of the schedule.
  SpherePoint apply(const SpherePoint& x, int n = 1) const { return evaluate(x, n).result(); }
  WEvaluation evaluate(const SpherePoint& x, int n = 1) const { return evaluate_w(family_, x, n); }

 private:
  MappingFamily family_;
};

inline SpherePoint apply_w(const WMapping& w, const SpherePoint& x, int n = 1) {
  return w.apply(x, n);
}

/// d(T_i x, x) for i = 1..r.
std::vector<double> residuals(const MappingFamily& family, const SpherePoint& x);

/// Short human-readable form; planes are printed 1-based.
std::string describe(const Mapping& map);

}  // namespace cqsphere
