#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cqsphere/iteration.hpp"
#include "cqsphere/oracle.hpp"

namespace py = pybind11;
using namespace cqsphere;

namespace {

// A mapping is given from Python as a list of (i, j, angle) plane rotations,
// 0-based, applied in order; the empty list is the identity.
using RotationList = std::vector<std::tuple<Eigen::Index, Eigen::Index, double>>;

Mapping to_mapping(const RotationList& rotations) {
  RotationChain chain;
  for (const auto& [i, j, angle] : rotations) chain.factors.push_back({i, j, angle});
  if (chain.factors.size() == 1) return chain.factors.front();
  return chain;
}

MappingFamily to_family(const std::vector<RotationList>& maps, const std::vector<double>& alphas,
                        double alpha_floor) {
  std::vector<Mapping> out;
  for (const RotationList& m : maps) out.push_back(to_mapping(m));
  return MappingFamily(std::move(out), alphas, alpha_floor);
}

Region to_region(const AmbientVector& pole, double radius, const Eigen::MatrixXd& normals) {
  const SpherePoint p(pole);
  Region r(p, radius, p);
  for (Eigen::Index k = 0; k < normals.rows(); ++k) {
    r = r.intersect_unverified(Halfspace(normals.row(k).transpose(), 0.0));
  }
  return r;
}

ProjectionSolver to_solver(const std::string& name) {
  if (name == "active-set") return ProjectionSolver::kActiveSet;
  if (name == "dykstra") return ProjectionSolver::kDykstra;
  throw InvalidArgument("solver must be 'active-set' or 'dykstra'");
}

Method to_method(const std::string& name) {
  if (name == "cq") return Method::kCQ;
  if (name == "shrinking") return Method::kShrinking;
  throw InvalidArgument("method must be 'cq' or 'shrinking'");
}

py::dict trace_columns(const Trace& trace, std::size_t r) {
  const auto n = static_cast<Eigen::Index>(trace.size());
  Eigen::VectorXi iteration(n), constraints(n), sweeps(n);
  Eigen::VectorXd dist(n), step(n);
  Eigen::MatrixXd res(n, static_cast<Eigen::Index>(r));
  for (Eigen::Index k = 0; k < n; ++k) {
    const TraceRecord& t = trace[static_cast<std::size_t>(k)];
    iteration[k] = t.n;
    dist[k] = t.dist_x1_xn;
    step[k] = t.step_len;
    for (std::size_t i = 0; i < r; ++i) res(k, static_cast<Eigen::Index>(i)) = t.residuals[i];
    constraints[k] = t.constraint_count;
    sweeps[k] = t.solver_sweeps;
  }
  py::dict d;
  d["n"] = iteration;
  d["dist_x1_xn"] = dist;
  d["step_len"] = step;
  d["residuals"] = res;
  d["constraint_count"] = constraints;
  d["solver_sweeps"] = sweeps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CQ and shrinking projection methods on the unit sphere";

  static py::exception<Error> base(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def(
      "distance",
      [](const AmbientVector& x, const AmbientVector& y) {
        return distance(SpherePoint(x), SpherePoint(y));
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "geodesic_combine",
      [](double alpha, const AmbientVector& x, const AmbientVector& y) {
        return geodesic_combine(alpha, SpherePoint(x), SpherePoint(y)).coords();
      },
      py::arg("alpha"), py::arg("x"), py::arg("y"));

  m.def(
      "pal_inequality_gap",
      [](double t, const AmbientVector& x, const AmbientVector& y, const AmbientVector& z) {
        return pal_inequality_gap(t, SpherePoint(x), SpherePoint(y), SpherePoint(z));
      },
      py::arg("t"), py::arg("x"), py::arg("y"), py::arg("z"));

  m.def(
      "random_point_in_cap",
      [](const AmbientVector& center, double rho, std::uint64_t seed) {
        return random_point_in_cap(SpherePoint(center), rho, seed).coords();
      },
      py::arg("center"), py::arg("rho"), py::arg("seed"));

  m.def(
      "project",
      [](const AmbientVector& pole, double radius, const Eigen::MatrixXd& normals,
         const AmbientVector& x, const std::string& solver) {
        const Region r = to_region(pole, radius, normals);
        ProjectOptions opts;
        opts.solver = to_solver(solver);
        const Projection p = project(r, SpherePoint(x), opts);
        return py::make_tuple(p.point.coords(), p.stats.sweeps, p.stats.certified);
      },
      py::arg("pole"), py::arg("radius"), py::arg("normals"), py::arg("x"),
      py::arg("solver") = "active-set",
      "Metric projection of x onto {d(., pole) <= radius, <n_k, .> >= 0}. "
      "Returns (point, sweeps, certified).");

  m.def(
      "brute_project",
      [](const AmbientVector& pole, double radius, const Eigen::MatrixXd& normals,
         const AmbientVector& x, double h) {
        return oracle::brute_project(to_region(pole, radius, normals), SpherePoint(x), h).coords();
      },
      py::arg("pole"), py::arg("radius"), py::arg("normals"), py::arg("x"), py::arg("h") = 1e-2);

  m.def(
      "apply_w",
      [](const std::vector<RotationList>& maps, const std::vector<double>& alphas,
         const AmbientVector& x) {
        const WEvaluation ev = evaluate_w(to_family(maps, alphas, 0.25), SpherePoint(x));
        return ev.result().coords();
      },
      py::arg("maps"), py::arg("alphas"), py::arg("x"));

  m.def(
      "residuals",
      [](const std::vector<RotationList>& maps, const AmbientVector& x) {
        return residuals(to_family(maps, std::vector<double>(maps.size(), 0.5), 0.25),
                         SpherePoint(x));
      },
      py::arg("maps"), py::arg("x"));

  m.def(
      "common_fixed_basis",
      [](const std::vector<RotationList>& maps, Eigen::Index dim) {
        return to_family(maps, std::vector<double>(maps.size(), 0.5), 0.25)
            .common_fixed_basis(dim);
      },
      py::arg("maps"), py::arg("dim"));

  m.def(
      "run",
      [](const AmbientVector& pole, double radius, const std::vector<RotationList>& maps,
         const std::vector<double>& alphas, const AmbientVector& x1, const std::string& method,
         double eps_step, double eps_residual, int max_iter, const std::string& solver,
         double alpha_floor) {
        const Problem p =
            make_problem(SpherePoint(pole), radius, to_family(maps, alphas, alpha_floor),
                         SpherePoint(x1));
        ProjectOptions opts;
        opts.solver = to_solver(solver);
        const RunResult r = [&] {
          py::gil_scoped_release release;
          return run(p, to_method(method), {eps_step, eps_residual, max_iter}, opts);
        }();
        py::dict out;
        out["final_point"] = r.final_point.coords();
        out["stop_reason"] = std::string(to_string(r.reason));
        out["iterations"] = r.trace.size();
        out["fejer_audit"] = fejer_audit(r.trace);
        out["trace"] = trace_columns(r.trace, p.family.size());
        return out;
      },
      py::arg("pole"), py::arg("radius"), py::arg("maps"), py::arg("alphas"), py::arg("x1"),
      py::arg("method") = "cq", py::arg("eps_step") = 1e-8, py::arg("eps_residual") = 1e-8,
      py::arg("max_iter") = 10000, py::arg("solver") = "active-set",
      py::arg("alpha_floor") = 0.25);
}
