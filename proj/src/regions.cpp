#include "cqsphere/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace cqsphere {

namespace {

constexpr double kWitnessTolerance = 1e-10;

void check_radius(double radius) {
  if (!(radius > 0.0 && radius < std::numbers::pi / 4)) {
    throw InvalidArgument("cap radius must lie in (0, pi/4), got " + std::to_string(radius));
  }
}

// Closed-form projection onto the halfspace cone {z : ⟨a,z⟩ ≥ 0}, ‖a‖ = 1.
void project_onto_halfspace(AmbientVector& v, const AmbientVector& a) {
  const double s = a.dot(v);
  if (s < 0.0) v -= s * a;
}

}  // namespace

Halfspace::Halfspace(AmbientVector normal, double offset)
    : normal_(std::move(normal)), offset_(offset), trivial_(false) {
  if (!normal_.allFinite() || !std::isfinite(offset_)) {
    throw InvalidArgument("halfspace has non-finite data");
  }
  const double norm = normal_.norm();
  if (norm <= kTrivialNormalTolerance) {
    if (offset_ > 0.0) {
      throw InvalidArgument("zero-normal halfspace with positive offset is empty");
    }
    normal_.setZero();
    trivial_ = true;
  } else {
    normal_ /= norm;
  }
}

Halfspace Halfspace::trivial(Eigen::Index dim) { return Halfspace(AmbientVector::Zero(dim), 0.0); }

Halfspace Halfspace::cap(const SpherePoint& pole, double radius) {
  return Halfspace(pole.coords(), std::cos(radius));
}

Halfspace make_cn(const SpherePoint& x_n, const SpherePoint& y_n) {
  return Halfspace(y_n.coords() - x_n.coords(), 0.0);
}

Halfspace make_cn(const AmbientVector& displacement) { return Halfspace(displacement, 0.0); }

Halfspace make_qn(const SpherePoint& x_1, const SpherePoint& x_n) {
  // cos d(x_1, x_n) is the clamped inner product itself.
  return Halfspace(inner(x_1, x_n) * x_n.coords() - x_1.coords(), 0.0);
}

Region::Region(const SpherePoint& pole, double radius, const SpherePoint& witness)
    : pole_(pole), radius_(radius), cap_(Halfspace::cap(pole, radius)) {
  check_radius(radius);
  if (witness.dim() != pole.dim()) {
    throw InvalidArgument("witness dimension does not match the cap pole");
  }
  if (cap_.slack(witness) < -kWitnessTolerance) {
    throw WitnessInfeasible("witness lies outside the cap");
  }
  witness_ = witness;
}

double Region::min_slack(const SpherePoint& z) const {
  double m = cap_.slack(z);
  for (const Halfspace& h : linear_) {
    m = std::min(m, h.slack(z));
  }
  return m;
}

Region Region::with_witness(const SpherePoint& witness, double tol) const {
  if (min_slack(witness) < -tol) {
    throw WitnessInfeasible("witness violates a region constraint (slack " +
                            std::to_string(min_slack(witness)) + ")");
  }
  Region out = *this;
  out.witness_ = witness;
  return out;
}

Region Region::intersect_unverified(const Halfspace& h) const {
  if (h.dim() != dim()) {
    throw InvalidArgument("halfspace dimension does not match the region");
  }
  Region out = *this;
  if (!h.is_trivial()) {
    out.linear_.push_back(h);
    out.witness_.reset();
  }
  return out;
}

bool contains(const Region& r, const SpherePoint& z, double tol) {
  return r.min_slack(z) >= -tol;
}

Region intersect(const Region& r, const Halfspace& h, const SpherePoint& new_witness) {
  if (h.dim() != r.dim()) {
    throw InvalidArgument("halfspace dimension does not match the region");
  }
  const double slack = std::min(r.min_slack(new_witness), h.slack(new_witness));
  if (slack < -kWitnessTolerance) {
    throw WitnessInfeasible("new witness violates the intersected region (slack " +
                            std::to_string(slack) + ")");
  }
  Region out = r;
  if (!h.is_trivial()) {
    out.linear_.push_back(h);
  }
  out.witness_ = new_witness;
  return out;
}

AmbientVector project_onto_circular_cone(const AmbientVector& v, const AmbientVector& axis,
                                         double half_angle) {
  const double s = axis.dot(v);
  AmbientVector u = v - s * axis;
  const double t = u.norm();
  const double c = std::cos(half_angle);
  const double sn = std::sin(half_angle);
  if (s >= 0.0 && t * c <= s * sn) {
    return v;
  }
  // Along the extreme generator g = cos·axis + sin·û facing v.
  const double along = s * c + t * sn;
  if (along <= 0.0 || t == 0.0) {
    return AmbientVector::Zero(v.size());
  }
  u /= t;
  return along * (c * axis + sn * u);
}

namespace {

// View of one constraint ⟨normal, z⟩ ≥ offset; index 0 is the cap.
struct ConstraintRef {
  const AmbientVector* normal;
  double offset;
};

std::vector<ConstraintRef> gather(const Region& r) {
  std::vector<ConstraintRef> out;
  out.reserve(r.linear().size() + 1);
  out.push_back({&r.cap().normal(), r.cap().offset()});
  for (const Halfspace& h : r.linear()) out.push_back({&h.normal(), h.offset()});
  return out;
}

constexpr double kCertificateTolerance = 1e-12;

// Maximizes ⟨x,z⟩ over the unit ball with the constraints in `working` held
// as equalities, then checks the KKT conditions of the full problem
//   max ⟨x,z⟩  s.t.  ‖z‖ ≤ 1,  ⟨b_i,z⟩ ≥ c_i.
// On the sphere this problem has the same solution as the cone projection.
std::optional<AmbientVector> certified_solution(const std::vector<ConstraintRef>& cons,
                                                const std::vector<std::size_t>& working,
                                                const AmbientVector& x) {
  const Eigen::Index d = x.size();
  const auto k = static_cast<Eigen::Index>(working.size());
  Eigen::MatrixXd b(k, d);
  Eigen::VectorXd c(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    b.row(i) = cons[working[static_cast<std::size_t>(i)]].normal->transpose();
    c[i] = cons[working[static_cast<std::size_t>(i)]].offset;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(b * b.transpose());
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) return std::nullopt;

  const AmbientVector z0 = b.transpose() * llt.solve(c);
  const AmbientVector px = x - b.transpose() * llt.solve(b * x);
  const double r2 = 1.0 - z0.squaredNorm();
  const double pxn = px.norm();
  if (r2 <= 0.0 || pxn <= 1e-14) return std::nullopt;
  const double radius = std::sqrt(r2);
  const AmbientVector z = z0 + (radius / pxn) * px;

  // x + Bᵀλ = μz with μ > 0 and λ ≥ 0.
  const double mu = pxn / radius;
  const Eigen::VectorXd lambda = llt.solve(b * (mu * z - x));
  if ((lambda.array() < -kCertificateTolerance).any()) return std::nullopt;
  for (const ConstraintRef& con : cons) {
    if (con.normal->dot(z) - con.offset < -kCertificateTolerance) return std::nullopt;
  }
  return z;
}

// Euclidean projection of v onto the polyhedral cone {w : ⟨a_i,w⟩ ≥ 0}.
// By Moreau, w = v + Σλ_i a_i where λ ≥ 0 minimizes ‖v + Σλ_i a_i‖; that
// nonnegative least-squares problem is solved by Lawson–Hanson.
struct ConeProjection {
  AmbientVector w;
  std::vector<std::size_t> active;  // indices into the halfspace list
  int iterations = 0;
};

ConeProjection project_onto_polyhedral_cone(const std::vector<Halfspace>& hs,
                                            const AmbientVector& v, int max_iterations) {
  const Eigen::Index d = v.size();
  const std::size_t m = hs.size();
  ConeProjection out{v, {}, 0};
  if (m == 0) return out;

  std::vector<double> lambda(m, 0.0);
  std::vector<bool> passive(m, false);
  std::vector<std::size_t> pset;
  const double tol = 1e-15 * static_cast<double>(std::max<std::size_t>(m, 10));

  auto residual = [&] {
    AmbientVector r = v;
    for (std::size_t i : pset) r += lambda[i] * hs[i].normal();
    return r;
  };

  AmbientVector r = v;
  for (;;) {
    // The most violated constraint at the current residual enters.
    std::size_t enter = m;
    double worst = tol;
    for (std::size_t i = 0; i < m; ++i) {
      if (passive[i]) continue;
      const double g = -hs[i].normal().dot(r);
      if (g > worst) {
        worst = g;
        enter = i;
      }
    }
    if (enter == m) break;
    passive[enter] = true;
    pset.push_back(enter);

    for (;;) {
      if (++out.iterations > max_iterations) {
        throw NoConvergence("active-set projection exceeded " + std::to_string(max_iterations) +
                            " iterations");
      }
      // Unconstrained least squares on the passive columns: min ‖v + E s‖.
      Eigen::MatrixXd e(d, static_cast<Eigen::Index>(pset.size()));
      for (std::size_t k = 0; k < pset.size(); ++k) {
        e.col(static_cast<Eigen::Index>(k)) = hs[pset[k]].normal();
      }
      const Eigen::VectorXd s = e.colPivHouseholderQr().solve(-v);
      bool feasible = true;
      for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s[k] <= 0.0) feasible = false;
      }
      if (feasible) {
        for (std::size_t k = 0; k < pset.size(); ++k) lambda[pset[k]] = s[static_cast<Eigen::Index>(k)];
        break;
      }
      // Step toward s until the first passive weight hits zero.
      double step = 1.0;
      for (std::size_t k = 0; k < pset.size(); ++k) {
        const double sk = s[static_cast<Eigen::Index>(k)];
        if (sk <= 0.0) {
          const double li = lambda[pset[k]];
          step = std::min(step, li / (li - sk));
        }
      }
      std::vector<std::size_t> kept;
      for (std::size_t k = 0; k < pset.size(); ++k) {
        double& li = lambda[pset[k]];
        li += step * (s[static_cast<Eigen::Index>(k)] - li);
        if (li <= 1e-300) {
          li = 0.0;
          passive[pset[k]] = false;
        } else {
          kept.push_back(pset[k]);
        }
      }
      pset = std::move(kept);
      if (pset.empty()) break;
    }
    r = residual();
  }
  out.w = residual();
  out.active = pset;
  return out;
}

// Spherical projection onto r via the dual of max ⟨x,z⟩ over ‖z‖ ≤ 1 ∩ r:
//   min_{t ≥ 0} ‖P_A(x + t·p)‖ − t·cos ρ,
// where P_A is the projection onto the halfspace cone and t the cap
// multiplier. The derivative ⟨z(t), p⟩ − cos ρ with z(t) = P_A(x+tp)/‖·‖ is
// nondecreasing, so the optimal t is found by bisection.
Projection project_active_set(const Region& r, const SpherePoint& x, const ProjectOptions& opts) {
  const AmbientVector& p = r.pole().coords();
  const double cos_rho = std::cos(r.radius());
  SolveStats stats;
  const int budget = opts.max_sweeps;

  auto solve = [&](double t) {
    ConeProjection cp = project_onto_polyhedral_cone(r.linear(), x.coords() + t * p, budget);
    stats.sweeps += cp.iterations;
    return cp;
  };
  auto cap_gap = [&](const ConeProjection& cp) {
    const double n = cp.w.norm();
    return n <= 1e-14 ? -1.0 : p.dot(cp.w) / n - cos_rho;
  };

  ConeProjection cp = solve(0.0);
  bool cap_active = false;
  if (cap_gap(cp) < 0.0) {
    cap_active = true;
    double lo = 0.0;
    double hi = 1.0;
    ConeProjection at_hi = solve(hi);
    while (cap_gap(at_hi) < 0.0) {
      if (hi > 1e12) {
        throw EmptyOrDegenerate("no point of the cap satisfies the halfspace constraints");
      }
      lo = hi;
      hi *= 2.0;
      at_hi = solve(hi);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      ConeProjection at_mid = solve(mid);
      if (cap_gap(at_mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
        at_hi = std::move(at_mid);
      }
    }
    cp = std::move(at_hi);
  }
  if (cp.w.norm() <= 1e-14) {
    throw EmptyOrDegenerate("cone projection vanished: point is at least pi/2 from the region");
  }

  // Exact finish on the identified active set.
  const std::vector<ConstraintRef> cons = gather(r);
  std::vector<std::size_t> working;
  if (cap_active) working.push_back(0);
  for (std::size_t i : cp.active) working.push_back(i + 1);
  // A candidate on the far side of x (⟨x,z⟩ ≤ 0) means the true cone
  // projection is zero and the bisection has drifted on a flat dual.
  auto vanished = [&](const SpherePoint& z) {
    if (inner(z, x) <= 1e-12) {
      throw EmptyOrDegenerate("cone projection vanished: point is at least pi/2 from the region");
    }
  };
  if (auto z = certified_solution(cons, working, x.coords())) {
    stats.certified = true;
    SpherePoint out(std::move(*z));
    vanished(out);
    return {std::move(out), stats};
  }
  SpherePoint z(std::move(cp.w));
  vanished(z);
  if (r.min_slack(z) < -1e-8) {
    throw NoConvergence("active-set projection ended infeasible (slack " +
                        std::to_string(r.min_slack(z)) + ")");
  }
  return {std::move(z), stats};
}

Projection project_dykstra(const Region& r, const SpherePoint& x, const ProjectOptions& opts) {
  const std::vector<Halfspace>& linear = r.linear();
  const std::size_t nsets = linear.size() + 1;  // set 0 is the cap cone
  std::vector<AmbientVector> increments(nsets, AmbientVector::Zero(x.dim()));
  AmbientVector v = x.coords();
  AmbientVector shifted(x.dim());

  SolveStats stats;
  bool converged = false;
  while (stats.sweeps < opts.max_sweeps) {
    ++stats.sweeps;
    double change = 0.0;
    for (std::size_t k = 0; k < nsets; ++k) {
      shifted = v + increments[k];
      AmbientVector p;
      if (k == 0) {
        p = project_onto_circular_cone(shifted, r.pole().coords(), r.radius());
      } else {
        p = shifted;
        project_onto_halfspace(p, linear[k - 1].normal());
      }
      increments[k] = shifted - p;
      change += (p - v).squaredNorm();
      v = std::move(p);
    }
    stats.last_change = std::sqrt(change);
    if (stats.last_change <= opts.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoConvergence("Dykstra projection did not converge within " +
                        std::to_string(opts.max_sweeps) + " sweeps (last change " +
                        std::to_string(stats.last_change) + ")");
  }
  if (v.norm() <= 1e-14) {
    throw EmptyOrDegenerate("cone projection vanished: point is at least pi/2 from the region");
  }
  return {SpherePoint(std::move(v)), stats};
}

}  // namespace

Projection project(const Region& r, const SpherePoint& x, const ProjectOptions& opts) {
  if (x.dim() != r.dim()) {
    throw InvalidArgument("point dimension does not match the region");
  }
  if (contains(r, x, 0.0)) {
    return {x, SolveStats{}};
  }
  return opts.solver == ProjectionSolver::kDykstra ? project_dykstra(r, x, opts)
                                                   : project_active_set(r, x, opts);
}

}  // namespace cqsphere
