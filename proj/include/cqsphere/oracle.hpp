#pragma once

// Independent answer generators for tests and acceptance runs: brute-force
// grid search on the 2-sphere and closed-form projections. Nothing in the
// iteration drivers depends on this header.

#include <utility>
#include <vector>

#include "cqsphere/regions.hpp"

namespace cqsphere::oracle {

/// Points covering a cap of S² so that every cap point is within
/// `resolution` of some grid point.
struct GeodesicGrid {
  std::vector<SpherePoint> points;
  double resolution = 0.0;
};

/// Rings of constant polar angle about the pole, spaced `h` apart in both
/// directions. Requires a point of S² (ambient dimension 3).
GeodesicGrid cap_grid(const SpherePoint& pole, double radius, double h);

/// Feasible grid point nearest to x, after one local refinement pass at
/// resolution h/100 around the coarse winner plus a sweep of every
/// constraint boundary circle at the same spacing. Ambient dimension must be 3.
/// Throws NoFeasibleGridPoint when no coarse grid point is feasible.
SpherePoint brute_project(const Region& r, const SpherePoint& x, double h = 1e-2);

/// Metric projection onto the great sphere of span(basis): the orthogonal
/// projection, renormalized. Throws DegenerateInput when it vanishes.
SpherePoint subspace_project(const SpherePoint& x, const Eigen::MatrixXd& basis);

/// Metric projection onto the great circle of the coordinate plane
/// (kept_axes.first, kept_axes.second), 0-based.
SpherePoint circle_project(const SpherePoint& x, std::pair<Eigen::Index, Eigen::Index> kept_axes);

/// Projection onto the cap {d(·, pole) ≤ radius}: x itself if inside,
/// otherwise the point at distance `radius` on the geodesic from pole to x.
SpherePoint cap_project(const SpherePoint& pole, double radius, const SpherePoint& x);

/// True iff sin δ < sin(αδ) + sin((1−α)δ) for every δ of the grid, so that
/// the reverse inequality forces δ = 0.
bool sin_lemma_check(const std::vector<double>& delta_grid, double alpha);

/// n points spaced evenly from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace cqsphere::oracle
