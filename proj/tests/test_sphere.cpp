#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cqsphere/sphere.hpp"

namespace cqsphere {
namespace {

constexpr double kPi = std::numbers::pi;

SpherePoint e(Eigen::Index dim, Eigen::Index i) { return SpherePoint::basis(dim, i); }

SpherePoint vec(std::initializer_list<double> v) {
  AmbientVector a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) a[k++] = x;
  return SpherePoint(a);
}

TEST(SpherePoint, NormalizesInput) {
  const SpherePoint p = vec({3.0, 4.0});
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  EXPECT_NEAR(p.coords().norm(), 1.0, 1e-15);
}

TEST(SpherePoint, RejectsBadInput) {
  EXPECT_THROW(vec({1.0}), InvalidArgument);
  EXPECT_THROW(vec({0.0, 0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(vec({NAN, 1.0}), InvalidArgument);
  EXPECT_THROW(vec({INFINITY, 1.0}), InvalidArgument);
}

TEST(Inner, BasisValues) {
  EXPECT_EQ(inner(e(4, 0), e(4, 0)), 1.0);
  EXPECT_EQ(inner(e(4, 0), e(4, 1)), 0.0);
  EXPECT_EQ(inner(e(4, 0), -e(4, 0)), -1.0);
}

TEST(Distance, BasisValues) {
  EXPECT_EQ(distance(e(4, 0), e(4, 0)), 0.0);
  EXPECT_NEAR(distance(e(4, 0), e(4, 1)), kPi / 2, 1e-15);
  EXPECT_NEAR(distance(e(4, 0), vec({std::cos(0.3), std::sin(0.3), 0, 0})), 0.3, 1e-15);
  EXPECT_NEAR(distance(e(3, 2), -e(3, 2)), kPi, 1e-15);
}

TEST(Distance, KeepsPrecisionForNearbyPoints) {
  for (double t : {1e-4, 1e-8, 1e-12}) {
    const SpherePoint y = vec({std::cos(t), std::sin(t), 0.0});
    EXPECT_NEAR(distance(e(3, 0), y) / t, 1.0, 1e-9) << t;
  }
}

TEST(Distance, MetricAxiomsOnRandomPoints) {
  SphereSampler s(11);
  for (int k = 0; k < 1000; ++k) {
    const SpherePoint x = s.uniform(5), y = s.uniform(5), z = s.uniform(5);
    EXPECT_NEAR(distance(x, y), distance(y, x), 1e-15);
    EXPECT_LE(distance(x, z), distance(x, y) + distance(y, z) + 1e-12);
    EXPECT_NEAR(distance(x, y), std::acos(inner(x, y)), 1e-7);
  }
}

TEST(GeodesicCombine, Endpoints) {
  SphereSampler s(3);
  const SpherePoint x = s.uniform(4), y = s.uniform(4);
  EXPECT_EQ(geodesic_combine(1.0, x, y).coords(), x.coords());
  EXPECT_EQ(geodesic_combine(0.0, x, y).coords(), y.coords());
}

TEST(GeodesicCombine, Midpoint) {
  const SpherePoint m = geodesic_combine(0.5, e(4, 0), e(4, 1));
  EXPECT_NEAR(m[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(m[1], std::sqrt(0.5), 1e-15);
  EXPECT_EQ(m[2], 0.0);
}

TEST(GeodesicCombine, SplitsDistanceByWeight) {
  SphereSampler s(5);
  for (int k = 0; k < 500; ++k) {
    const SpherePoint x = s.uniform(4), y = s.uniform(4);
    const double a = s.real(0.0, 1.0);
    const SpherePoint v = geodesic_combine(a, x, y);
    const double d = distance(x, y);
    EXPECT_NEAR(distance(v, y), a * d, 1e-12);
    EXPECT_NEAR(distance(v, x), (1.0 - a) * d, 1e-12);
  }
}

TEST(GeodesicCombine, CoincidentPointsAndErrors) {
  const SpherePoint x = vec({0.2, 0.3, 0.9});
  EXPECT_EQ(geodesic_combine(0.3, x, x).coords(), x.coords());
  EXPECT_THROW(geodesic_combine(0.5, x, -x), AntipodalPoints);
  EXPECT_THROW(geodesic_combine(1.5, x, x), InvalidArgument);
  EXPECT_THROW(geodesic_combine(-0.1, x, x), InvalidArgument);
}

TEST(PalInequality, EndpointGapIsZero) {
  SphereSampler s(8);
  const SpherePoint c = e(4, 3);
  const SpherePoint x = s.point_in_cap(c, 0.7), y = s.point_in_cap(c, 0.7),
                    z = s.point_in_cap(c, 0.7);
  EXPECT_NEAR(pal_inequality_gap(1.0, x, y, z), 0.0, 1e-15);
  EXPECT_NEAR(pal_inequality_gap(0.0, x, y, z), 0.0, 1e-15);
}

TEST(PalInequality, BasisMidpoint) {
  // v = midpoint of e1,e2; cos d(v,e1)·1 − (1·sin(π/4) + 0) = 0.
  const double gap = pal_inequality_gap(0.5, e(3, 0), e(3, 1), e(3, 0));
  EXPECT_GE(gap, -1e-15);
  EXPECT_NEAR(gap, 0.0, 1e-15);
}

TEST(PalInequality, RandomSweepInCap) {
  SphereSampler s(2024);
  const SpherePoint c = e(5, 0);
  double worst = 1.0;
  for (int k = 0; k < 20000; ++k) {
    const SpherePoint x = s.point_in_cap(c, 0.7), y = s.point_in_cap(c, 0.7),
                      z = s.point_in_cap(c, 0.7);
    worst = std::min(worst, pal_inequality_gap(s.real(0.0, 1.0), x, y, z));
  }
  EXPECT_GE(worst, -1e-10);
}

TEST(PalInequality, RejectsLongPerimeter) {
  // Three points 2π/3 apart on a great circle have perimeter exactly 2π.
  const SpherePoint x = vec({1, 0, 0});
  const SpherePoint y = vec({std::cos(2 * kPi / 3), std::sin(2 * kPi / 3), 0});
  const SpherePoint z = vec({std::cos(4 * kPi / 3), std::sin(4 * kPi / 3), 0});
  EXPECT_THROW(pal_inequality_gap(0.5, x, y, z), PerimeterTooLarge);
}

TEST(Sampler, CapSamplesStayInCap) {
  SphereSampler s(1);
  const SpherePoint c = e(4, 0);
  for (int k = 0; k < 10000; ++k) EXPECT_LE(distance(s.point_in_cap(c, 0.5), c), 0.5);
}

TEST(Sampler, TinyRadiusCollapsesToCenter) {
  const SpherePoint c = vec({1, 2, 3, 4});
  EXPECT_LE(distance(random_point_in_cap(c, 1e-9, 4), c), 1e-9);
}

TEST(Sampler, Deterministic) {
  const SpherePoint c = e(4, 3);
  EXPECT_EQ(random_point_in_cap(c, 0.6, 42).coords(), random_point_in_cap(c, 0.6, 42).coords());
  EXPECT_NE(random_point_in_cap(c, 0.6, 42).coords(), random_point_in_cap(c, 0.6, 43).coords());
}

TEST(Sampler, CapSamplesAreSpread) {
  // The polar angle of a uniform cap sample on S² has P(φ ≤ ρ/2) =
  // (1 − cos(ρ/2)) / (1 − cos ρ).
  SphereSampler s(9);
  const SpherePoint c = e(3, 2);
  const double rho = 0.6;
  int inner_count = 0;
  const int total = 20000;
  for (int k = 0; k < total; ++k) inner_count += distance(s.point_in_cap(c, rho), c) <= rho / 2;
  const double expected = (1 - std::cos(rho / 2)) / (1 - std::cos(rho));
  EXPECT_NEAR(static_cast<double>(inner_count) / total, expected, 0.015);
}

}  // namespace
}  // namespace cqsphere
