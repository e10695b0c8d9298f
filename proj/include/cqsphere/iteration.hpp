#pragma once

// Drivers for the CQ projection method and the shrinking projection method.
//
// Both iterate y_n = W_n x_n and x_{n+1} = P_{D_n} x_1 where
//   CQ:        D_n = C ∩ {d(y_n,·) ≤ d(x_n,·)} ∩ {cos d(x_1,x_n)·cos d(x_n,·) ≥ cos d(x_1,·)}
//   shrinking: D_n = D_{n−1} ∩ {d(y_n,·) ≤ d(x_n,·)},  D_0 = C.

#include <optional>
#include <string_view>
#include <vector>

#include "cqsphere/mappings.hpp"
#include "cqsphere/regions.hpp"

namespace cqsphere {

enum class Method { kCQ, kShrinking };
enum class StopReason { kConverged, kIterationCap };

std::string_view to_string(Method m);
std::string_view to_string(StopReason r);

/// Tolerances of the runtime checks performed at every step.
inline constexpr double kFejerTolerance = 1e-10;
inline constexpr double kContainmentTolerance = 1e-8;

struct Problem {
  SpherePoint cap_pole;
  double cap_radius;
  MappingFamily family;
  SpherePoint x1;
  /// Orthonormal basis (columns) of the common fixed subspace, when known.
  /// Its unit sphere intersected with the cap is F.
  std::optional<Eigen::MatrixXd> known_fixed_basis;

  Eigen::Index dim() const noexcept { return cap_pole.dim(); }

  /// Checks x1 ∈ C, cap invariance of the family and, when a fixed basis is
  /// given, that F meets the cap. Throws InvalidArgument otherwise.
  void validate() const;

  /// Points of F inside the cap used for the containment assertions: the
  /// point of F nearest the pole and the point nearest x1 (when in the cap).
  std::vector<SpherePoint> fixed_representatives() const;
};

/// Problem with the known fixed basis filled from the family (linear maps only).
Problem make_problem(const SpherePoint& pole, double radius, MappingFamily family,
                     const SpherePoint& x1);

struct StopRule {
  double eps_step = 1e-8;
  double eps_residual = 1e-8;
  int max_iter = 10000;
};

struct TraceRecord {
  int n = 0;
  double dist_x1_xn = 0.0;
  double step_len = 0.0;
  std::vector<double> residuals;
  int constraint_count = 0;
  int solver_sweeps = 0;
};

using Trace = std::vector<TraceRecord>;

struct IterationState {
  int n = 1;
  SpherePoint x_n;
  std::optional<SpherePoint> y_n;
  /// CQ: the region of the last step. Shrinking: the running intersection.
  Region region;
  Trace trace;

  static IterationState initial(const Problem& p);
};

/// One CQ step. Throws FeasibilityViolated when a known fixed point leaves
/// C_n ∩ Q_n and MonotonicityViolated when d(x_1, x_n) decreases.
IterationState cq_step(const Problem& p, IterationState s,
                       const ProjectOptions& opts = {});

/// One shrinking step. The running region is nested by construction.
IterationState shrink_step(const Problem& p, IterationState s,
                           const ProjectOptions& opts = {});

struct RunResult {
  SpherePoint final_point;
  Trace trace;
  StopReason reason;
  /// Every non-trivial halfspace generated along the run, in order.
  std::vector<Halfspace> generated;
  /// Region of the final step (the full intersection for shrinking).
  Region final_region;
};

/// Iterates until d(x_n, x_{n+1}) ≤ eps_step and max_i d(T_i x_{n+1}, x_{n+1})
/// ≤ eps_residual, or until max_iter steps.
RunResult run(const Problem& p, Method method, const StopRule& stop = {},
              const ProjectOptions& opts = {});

/// True iff dist_x1_xn never decreases by more than 1e−10 along the trace.
bool fejer_audit(const Trace& trace);

}  // namespace cqsphere
