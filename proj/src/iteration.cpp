#include "cqsphere/iteration.hpp"

#include <algorithm>
#include <sstream>

namespace cqsphere {

namespace {

int count_constraints(const Region& r) { return static_cast<int>(r.linear().size()); }

// Normalized projection of q onto the span of `basis`, if it is nonzero.
std::optional<SpherePoint> project_onto_span(const Eigen::MatrixXd& basis,
                                             const AmbientVector& q) {
  if (basis.cols() == 0) return std::nullopt;
  AmbientVector v = basis * (basis.transpose() * q);
  if (v.norm() <= 1e-12) return std::nullopt;
  return SpherePoint(std::move(v));
}

std::string at_step(int n, const std::string& what) {
  std::ostringstream out;
  out << "step " << n << ": " << what;
  return out.str();
}

void check_fejer(const Problem& p, const IterationState& s, const SpherePoint& next) {
  const double before = distance(p.x1, s.x_n);
  const double after = distance(p.x1, next);
  if (after < before - kFejerTolerance) {
    std::ostringstream msg;
    msg << "d(x1, x_n) decreased from " << before << " to " << after;
    throw MonotonicityViolated(at_step(s.n, msg.str()));
  }
}

void check_fixed_points(const Region& region, const std::vector<SpherePoint>& reps, int n) {
  for (const SpherePoint& z : reps) {
    const double slack = region.min_slack(z);
    if (slack < -kContainmentTolerance) {
      std::ostringstream msg;
      msg << "known fixed point violates a constraint (slack " << slack << ")";
      throw FeasibilityViolated(at_step(n, msg.str()));
    }
  }
}

IterationState advance(const Problem& p, IterationState& s, const SpherePoint& y,
                       Region region, const ProjectOptions& opts) {
  Projection proj = [&] {
    try {
      return project(region, p.x1, opts);
    } catch (const NoConvergence& e) {
      throw NoConvergence(at_step(s.n, e.what()));
    } catch (const EmptyOrDegenerate& e) {
      throw EmptyOrDegenerate(at_step(s.n, e.what()));
    }
  }();
  check_fejer(p, s, proj.point);
  if (!region.witness()) {
    region = region.with_witness(proj.point, kContainmentTolerance);
  }

  TraceRecord rec;
  rec.n = s.n;
  rec.dist_x1_xn = distance(p.x1, s.x_n);
  rec.step_len = distance(s.x_n, proj.point);
  rec.residuals = residuals(p.family, s.x_n);
  rec.constraint_count = count_constraints(region);
  rec.solver_sweeps = proj.stats.sweeps;

  IterationState next{s.n + 1, proj.point, y, std::move(region), std::move(s.trace)};
  next.trace.push_back(std::move(rec));
  return next;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kCQ:
      return "cq";
    case Method::kShrinking:
      return "shrinking";
  }
  return "?";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kIterationCap:
      return "iteration-cap";
  }
  return "?";
}

void Problem::validate() const {
  if (x1.dim() != dim() || family.size() == 0) {
    throw InvalidArgument("problem dimensions are inconsistent");
  }
  // Region's constructor checks the radius and x1 ∈ C.
  try {
    Region(cap_pole, cap_radius, x1);
  } catch (const WitnessInfeasible&) {
    throw InvalidArgument("x1 lies outside the cap");
  }
  family.verify_cap_invariance(cap_pole, cap_radius);
  if (known_fixed_basis) {
    if (known_fixed_basis->rows() != dim()) {
      throw InvalidArgument("known fixed basis has the wrong dimension");
    }
    if (fixed_representatives().empty()) {
      throw InvalidArgument("the common fixed set does not meet the cap");
    }
  }
}

std::vector<SpherePoint> Problem::fixed_representatives() const {
  std::vector<SpherePoint> out;
  if (!known_fixed_basis) return out;
  const Halfspace cap = Halfspace::cap(cap_pole, cap_radius);
  for (const AmbientVector* q : {&cap_pole.coords(), &x1.coords()}) {
    if (auto z = project_onto_span(*known_fixed_basis, *q); z && cap.slack(*z) >= -1e-12) {
      out.push_back(*z);
    }
  }
  return out;
}

Problem make_problem(const SpherePoint& pole, double radius, MappingFamily family,
                     const SpherePoint& x1) {
  Eigen::MatrixXd basis = family.common_fixed_basis(pole.dim());
  Problem p{pole, radius, std::move(family), x1, std::move(basis)};
  p.validate();
  return p;
}

IterationState IterationState::initial(const Problem& p) {
  return IterationState{1, p.x1, std::nullopt, Region(p.cap_pole, p.cap_radius, p.x1), {}};
}

IterationState cq_step(const Problem& p, IterationState s, const ProjectOptions& opts) {
  const WEvaluation w = evaluate_w(p.family, s.x_n, s.n);
  const SpherePoint& y = w.result();
  Region region = Region(p.cap_pole, p.cap_radius, p.x1)
                      .intersect_unverified(make_cn(w.displacement))
                      .intersect_unverified(make_qn(p.x1, s.x_n));
  const std::vector<SpherePoint> reps = p.fixed_representatives();
  check_fixed_points(region, reps, s.n);
  if (!reps.empty()) {
    region = region.with_witness(reps.front(), kContainmentTolerance);
  }
  return advance(p, s, y, std::move(region), opts);
}

IterationState shrink_step(const Problem& p, IterationState s, const ProjectOptions& opts) {
  const WEvaluation w = evaluate_w(p.family, s.x_n, s.n);
  const SpherePoint& y = w.result();
  const Halfspace cut = make_cn(w.displacement);
  const std::vector<SpherePoint> reps = p.fixed_representatives();
  Region region = reps.empty() ? s.region.intersect_unverified(cut)
                               : intersect(s.region, cut, reps.front());
  check_fixed_points(region, reps, s.n);
  return advance(p, s, y, std::move(region), opts);
}

RunResult run(const Problem& p, Method method, const StopRule& stop, const ProjectOptions& opts) {
  if (!(stop.eps_step > 0.0 && stop.eps_residual > 0.0 && stop.max_iter > 0)) {
    throw InvalidArgument("stop rule tolerances and iteration cap must be positive");
  }
  IterationState state = IterationState::initial(p);
  std::vector<Halfspace> generated;
  StopReason reason = StopReason::kIterationCap;

  for (int k = 0; k < stop.max_iter; ++k) {
    const std::size_t before = method == Method::kCQ ? 0 : state.region.linear().size();
    state = method == Method::kCQ ? cq_step(p, std::move(state), opts)
                                  : shrink_step(p, std::move(state), opts);
    const auto& linear = state.region.linear();
    generated.insert(generated.end(), linear.begin() + static_cast<std::ptrdiff_t>(before),
                     linear.end());

    const std::vector<double> res = residuals(p.family, state.x_n);
    const double max_res = *std::max_element(res.begin(), res.end());
    if (state.trace.back().step_len <= stop.eps_step && max_res <= stop.eps_residual) {
      reason = StopReason::kConverged;
      break;
    }
  }
  return RunResult{state.x_n, std::move(state.trace), reason, std::move(generated),
                   std::move(state.region)};
}

bool fejer_audit(const Trace& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k].dist_x1_xn < trace[k - 1].dist_x1_xn - kFejerTolerance) return false;
  }
  return true;
}

}  // namespace cqsphere
