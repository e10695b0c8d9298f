#pragma once

// Spherically convex regions cut out by linear halfspaces, and the metric
// projection onto them.
//
// A region is {z ∈ S : ⟨p,z⟩ ≥ cos ρ, ⟨a_i,z⟩ ≥ 0 for all i}, a closed cap of
// radius ρ < π/4 intersected with homogeneous halfspaces. Its cone hull is
// K = {z : ⟨p,z⟩ ≥ cos ρ·‖z‖, ⟨a_i,z⟩ ≥ 0}, and the point of the region
// nearest to x is the Euclidean projection of x onto K, renormalized.

#include <optional>
#include <vector>

#include "cqsphere/sphere.hpp"

namespace cqsphere {

/// Tolerance under which a difference vector is treated as zero when building
/// the per-step halfspaces.
inline constexpr double kTrivialNormalTolerance = 1e-12;

/// The linear constraint ⟨normal, z⟩ ≥ offset. A zero normal with offset ≤ 0
/// is the trivial constraint satisfied everywhere.
class Halfspace {
 public:
  /// Normalizes `normal`; a vector with norm ≤ 1e−12 yields the trivial
  /// halfspace (offset must then be ≤ 0).
  Halfspace(AmbientVector normal, double offset);

  static Halfspace trivial(Eigen::Index dim);
  /// {z : d(z, pole) ≤ radius}, i.e. ⟨pole, z⟩ ≥ cos(radius).
  static Halfspace cap(const SpherePoint& pole, double radius);

  const AmbientVector& normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }
  bool is_trivial() const noexcept { return trivial_; }
  Eigen::Index dim() const noexcept { return normal_.size(); }

  /// ⟨normal, z⟩ − offset; non-negative on members.
  double slack(const AmbientVector& z) const { return normal_.dot(z) - offset_; }
  double slack(const SpherePoint& z) const { return slack(z.coords()); }

 private:
  AmbientVector normal_;
  double offset_;
  bool trivial_;
};

/// {z : d(y_n, z) ≤ d(x_n, z)}, rewritten as ⟨y_n − x_n, z⟩ ≥ 0.
Halfspace make_cn(const SpherePoint& x_n, const SpherePoint& y_n);
/// The same halfspace from a precomputed y_n − x_n.
Halfspace make_cn(const AmbientVector& displacement);

/// {z : cos d(x_1,x_n)·cos d(x_n,z) ≥ cos d(x_1,z)}, rewritten as
/// ⟨cos d(x_1,x_n)·x_n − x_1, z⟩ ≥ 0. Trivial when x_n = x_1.
Halfspace make_qn(const SpherePoint& x_1, const SpherePoint& x_n);

/// A cap of radius ρ < π/4 about a pole, intersected with an ordered list of
/// homogeneous halfspaces. Any two members are less than π/2 apart.
///
/// The witness, when present, is a point known to satisfy every constraint.
/// Regions produced by intersect_unverified carry none until one is attached.
class Region {
 public:
  /// The bare cap. The witness must lie in it.
  Region(const SpherePoint& pole, double radius, const SpherePoint& witness);

  const SpherePoint& pole() const noexcept { return pole_; }
  double radius() const noexcept { return radius_; }
  const Halfspace& cap() const noexcept { return cap_; }
  const std::vector<Halfspace>& linear() const noexcept { return linear_; }
  const std::optional<SpherePoint>& witness() const noexcept { return witness_; }
  Eigen::Index dim() const noexcept { return pole_.dim(); }

  /// Smallest slack over the cap and all linear constraints.
  double min_slack(const SpherePoint& z) const;

  /// Same constraints with `witness` attached. Throws WitnessInfeasible if it
  /// violates any constraint by more than `tol`.
  Region with_witness(const SpherePoint& witness, double tol = 1e-10) const;

  /// Appends h without a feasibility certificate; the result has no witness.
  Region intersect_unverified(const Halfspace& h) const;

 private:
  friend Region intersect(const Region&, const Halfspace&, const SpherePoint&);

  SpherePoint pole_;
  double radius_;
  Halfspace cap_;
  std::vector<Halfspace> linear_;
  std::optional<SpherePoint> witness_;
};

/// True iff every constraint holds at z up to `tol`.
bool contains(const Region& r, const SpherePoint& z, double tol);

/// r ∩ h with a new witness. Trivial halfspaces are not appended.
/// Throws WitnessInfeasible unless new_witness satisfies r and h with slack
/// ≥ −1e−10.
Region intersect(const Region& r, const Halfspace& h, const SpherePoint& new_witness);

enum class ProjectionSolver {
  /// Nonnegative least squares on the halfspace cone, bisection on the cap
  /// multiplier, and a KKT-checked closed-form finish.
  kActiveSet,
  /// Dykstra's alternating projections over the cap cone and halfspace cones.
  kDykstra,
};

struct ProjectOptions {
  ProjectionSolver solver = ProjectionSolver::kActiveSet;
  double tolerance = 1e-13;  // Dykstra: stop when a sweep moves the iterate less than this
  int max_sweeps = 10000;    // Dykstra sweeps, or active-set iterations
};

struct SolveStats {
  int sweeps = 0;
  double last_change = 0.0;
  /// True when the active-set answer passed the KKT check.
  bool certified = false;
};

struct Projection {
  SpherePoint point;
  SolveStats stats;
};

/// Metric projection of x onto r: the member minimizing d(x, ·), computed as
/// the renormalized Euclidean projection of x onto the cone hull of r.
///
/// Both solvers return the same point; `stats.sweeps` counts Dykstra sweeps
/// or active-set iterations. Throws EmptyOrDegenerate when the cone
/// projection vanishes and NoConvergence when the iteration budget runs out.
Projection project(const Region& r, const SpherePoint& x, const ProjectOptions& opts = {});

/// Euclidean projection onto {z : ⟨axis,z⟩ ≥ cos(half_angle)·‖z‖}, axis unit.
AmbientVector project_onto_circular_cone(const AmbientVector& v, const AmbientVector& axis,
                                         double half_angle);

}  // namespace cqsphere
