// Acceptance suite: one PASS/FAIL line per criterion at the pinned tolerances.
//
// Usage: cqsphere_acceptance [--cli PATH] [--config PATH] [--expect-fail 5,8]
// Exit status is 0 when every criterion either passes or is listed in
// --expect-fail; the listed ones still print FAIL when they fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqsphere/iteration.hpp"
#include "cqsphere/oracle.hpp"

namespace {

using namespace cqsphere;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;
const std::vector<std::uint64_t> kSeeds{1, 2, 3};

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

MappingFamily d4_family() {
  return MappingFamily({PlaneRotation{0, 1, 0.8}, PlaneRotation{0, 2, 0.5}}, {0.5, 0.5});
}

Problem d4_problem(std::uint64_t seed) {
  const SpherePoint pole = SpherePoint::basis(4, 3);
  return make_problem(pole, kPi / 5, d4_family(), random_point_in_cap(pole, kPi / 5, seed));
}

Problem single_problem(std::uint64_t seed) {
  AmbientVector p(4);
  p << 0, 0, std::sqrt(0.5), std::sqrt(0.5);
  const SpherePoint pole(p);
  return make_problem(pole, kPi / 5, MappingFamily({PlaneRotation{0, 1, 0.8}}, {0.5}),
                      random_point_in_cap(pole, kPi / 5, seed));
}

struct BenchRun {
  std::string label;
  Problem problem;
  SpherePoint target;  // P_F x1 from the closed-form oracle
  RunResult result;
  double seconds;
};

// Runs shared by criteria 5 to 8.
struct Benchmarks {
  std::vector<BenchRun> d4;
  std::vector<BenchRun> single;
};

Benchmarks run_benchmarks() {
  Benchmarks b;
  for (std::uint64_t seed : kSeeds) {
    for (Method m : {Method::kCQ, Method::kShrinking}) {
      Problem p = d4_problem(seed);
      const auto t0 = Clock::now();
      RunResult r = run(p, m, {1e-8, 1e-8, 500});
      const double s = seconds_since(t0);
      b.d4.push_back({fmt("d4 %s seed %llu", std::string(to_string(m)).c_str(),
                          static_cast<unsigned long long>(seed)),
                      std::move(p), SpherePoint::basis(4, 3), std::move(r), s});

      Problem q = single_problem(seed);
      const SpherePoint target = oracle::circle_project(q.x1, {2, 3});
      const auto t1 = Clock::now();
      RunResult rq = run(q, m);
      const double sq = seconds_since(t1);
      b.single.push_back({fmt("single %s seed %llu", std::string(to_string(m)).c_str(),
                              static_cast<unsigned long long>(seed)),
                          std::move(q), target, std::move(rq), sq});
    }
  }
  return b;
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  SphereSampler s(101);
  const SpherePoint c = SpherePoint::basis(4, 3);
  double worst = 1.0;
  for (int k = 0; k < 100000; ++k) {
    const SpherePoint x = s.point_in_cap(c, 0.7), y = s.point_in_cap(c, 0.7),
                      z = s.point_in_cap(c, 0.7);
    worst = std::min(worst, pal_inequality_gap(s.real(0.0, 1.0), x, y, z));
  }
  const double secs = seconds_since(t0);
  return {worst >= -1e-10 && secs < 5.0,
          fmt("min gap %.3e over 1e5 samples (>= -1e-10), %.2f s (< 5 s)", worst, secs)};
}

Outcome criterion2() {
  SphereSampler s(202);
  const SpherePoint c = SpherePoint::basis(4, 3);
  int bad_c = 0, bad_q = 0;
  for (int k = 0; k < 10000; ++k) {
    const SpherePoint xn = s.point_in_cap(c, 0.7), yn = s.point_in_cap(c, 0.7);
    const SpherePoint z = s.uniform(4);
    const double lin = make_cn(xn, yn).slack(z);
    const double met = distance(xn, z) - distance(yn, z);
    if (std::abs(lin) > 1e-10 && (lin > 0) != (met > 0)) ++bad_c;

    const SpherePoint x1 = s.point_in_cap(c, 0.7), xm = s.point_in_cap(c, 0.7);
    const SpherePoint w = s.uniform(4);
    const Halfspace q = make_qn(x1, xm);
    const double cd = std::cos(distance(x1, xm));
    const double qlin = q.slack(w) * (cd * xm.coords() - x1.coords()).norm();
    const double qmet = cd * std::cos(distance(xm, w)) - std::cos(distance(x1, w));
    if (std::abs(qlin) > 1e-10 && (qlin > 0) != (qmet > 0)) ++bad_q;
  }
  return {bad_c == 0 && bad_q == 0,
          fmt("sign disagreements outside 1e-10: C_n %d, Q_n %d (of 1e4 each)", bad_c, bad_q)};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  SphereSampler s(303);
  double worst = 0.0, worst_idem = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SpherePoint pole = s.uniform(3);
    const double radius = s.real(0.2, kPi / 4 - 0.05);
    const SpherePoint w = s.point_in_cap(pole, 0.5 * radius);
    Region r(pole, radius, w);
    const int cuts = trial % 4;
    for (int k = 0; k < cuts; ++k) {
      AmbientVector n = s.uniform(3).coords();
      n -= (n.dot(w.coords()) - s.real(0.0, 0.2)) * w.coords();
      r = intersect(r, Halfspace(n, 0.0), w);
    }
    const SpherePoint x = s.point_in_cap(pole, 0.8);
    const SpherePoint p = project(r, x).point;
    worst = std::max(worst, distance(p, oracle::brute_project(r, x, 1e-2)));
    worst_idem = std::max(worst_idem, distance(project(r, p).point, p));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-3 && worst_idem <= 1e-8 && secs < 60.0,
          fmt("max oracle gap %.3e (<= 1e-3), max idempotence gap %.3e (<= 1e-8), %.1f s (< 60 s)",
              worst, worst_idem, secs)};
}

Outcome criterion4() {
  const WMapping w(d4_family());
  const SpherePoint e4 = SpherePoint::basis(4, 3);
  const double fixed_gap = distance(w.apply(e4), e4);
  SphereSampler s(404);
  double min_move = 10.0;
  int tested = 0;
  while (tested < 1000) {
    const SpherePoint x = s.point_in_cap(e4, kPi / 5);
    if (distance(x, e4) <= 1e-12) continue;
    min_move = std::min(min_move, distance(w.apply(x), x));
    ++tested;
  }
  const Eigen::MatrixXd basis = d4_family().common_fixed_basis(4);
  const bool basis_ok = basis.cols() == 1 && std::abs(std::abs(basis(3, 0)) - 1.0) < 1e-12;
  return {fixed_gap <= 1e-12 && min_move > 1e-8 && basis_ok,
          fmt("d(We4,e4) %.3e (<= 1e-12), min d(Wx,x) %.3e over 1e3 points (> 1e-8), F = {e4}: %s",
              fixed_gap, min_move, basis_ok ? "yes" : "no")};
}

Outcome criterion5(const Benchmarks& b) {
  bool ok = true;
  std::string detail;
  for (const BenchRun& r : b.d4) {
    const double d = distance(r.result.final_point, r.target);
    const bool pass = d <= 1e-5 && r.seconds < 10.0;
    ok = ok && pass;
    detail += fmt("\n    %-22s n=%-4zu d(x_n,e4)=%.3e %.2fs %s", r.label.c_str(),
                  r.result.trace.size(), d, r.seconds, pass ? "ok" : "miss");
  }
  return {ok, "final distance to e4 <= 1e-5 within 500 iterations, < 10 s per run" + detail};
}

Outcome criterion6(const Benchmarks& b) {
  bool ok = true;
  std::string detail;
  for (const BenchRun& r : b.single) {
    const double d = distance(r.result.final_point, r.target);
    ok = ok && d <= 1e-5;
    detail += fmt("\n    %-26s n=%-5zu %-13s d(x_n,P_F x1)=%.3e", r.label.c_str(),
                  r.result.trace.size(), std::string(to_string(r.result.reason)).c_str(), d);
  }
  return {ok, "final iterate within 1e-5 of circle_project(x1, (3,4))" + detail};
}

Outcome criterion7(const Benchmarks& b) {
  bool fejer = true;
  double worst_slack = 1.0;
  std::size_t cuts = 0;
  for (const auto* group : {&b.d4, &b.single}) {
    for (const BenchRun& r : *group) {
      fejer = fejer && fejer_audit(r.result.trace);
      for (const Halfspace& h : r.result.generated) {
        for (const SpherePoint& f : r.problem.fixed_representatives()) {
          worst_slack = std::min(worst_slack, h.slack(f));
        }
        worst_slack = std::min(worst_slack, h.slack(r.target));
      }
      cuts += r.result.generated.size();
    }
  }
  return {fejer && worst_slack >= -1e-8,
          fmt("fejer_audit on all %zu runs: %s; min slack of known fixed points over %zu "
              "generated constraints %.3e (>= -1e-8)",
              b.d4.size() + b.single.size(), fejer ? "pass" : "FAIL", cuts, worst_slack)};
}

Outcome criterion8(const Benchmarks& b) {
  bool ok = true;
  std::string detail;
  for (const auto* group : {&b.d4, &b.single}) {
    for (const BenchRun& r : *group) {
      const double res = max_of(residuals(r.problem.family, r.result.final_point));
      ok = ok && res <= 1e-6;
      detail += fmt("\n    %-26s max residual %.3e", r.label.c_str(), res);
    }
  }
  return {ok, "final max_i d(T_i x_n, x_n) <= 1e-6 on both benchmarks" + detail};
}

Outcome criterion9() {
  const std::vector<double> grid = oracle::linspace(1e-6, kPi / 2, 10000);
  bool ok = true;
  for (int k = 1; k <= 9; ++k) ok = ok && oracle::sin_lemma_check(grid, k / 10.0);
  return {ok, "strict inequality on 1e4 deltas in [1e-6, pi/2] x alpha in {0.1..0.9}"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion10(const std::string& cli, const std::string& config) {
  if (cli.empty() || config.empty()) return {false, "no --cli/--config given"};
  const fs::path dir = fs::temp_directory_path() / "cqsphere_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> traces;
  for (int k = 0; k < 2; ++k) {
    const std::string prefix = (dir / ("run" + std::to_string(k))).string();
    const std::string cmd = "\"" + cli + "\" compare \"" + config + "\" --seed 7 --out \"" +
                            prefix + "\" > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return {false, "could not launch the CLI"};
    traces.push_back(slurp(prefix + "_cq_trace.csv") + slurp(prefix + "_shrinking_trace.csv"));
  }
  fs::remove_all(dir);
  const bool ok = !traces[0].empty() && traces[0] == traces[1];
  return {ok, fmt("two `compare` runs, seed 7: %zu trace bytes, identical: %s", traces[0].size(),
                  ok ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, config;
  std::set<int> expected_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--config" && i + 1 < argc) {
      config = argv[++i];
    } else if (a == "--expect-fail" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) expected_fail.insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "unknown argument: %s\n", a.c_str());
      return 64;
    }
  }

  const Benchmarks bench = run_benchmarks();
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, [&] { return criterion5(bench); }},
      {6, [&] { return criterion6(bench); }},
      {7, [&] { return criterion7(bench); }},
      {8, [&] { return criterion8(bench); }},
      {9, criterion9},
      {10, [&] { return criterion10(cli, config); }},
  };

  int unexpected = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expected_fail.count(id) > 0;
    if (!o.pass && !known) ++unexpected;
    std::printf("criterion %2d: %s%s  %s\n", id, o.pass ? "PASS" : "FAIL",
                !o.pass && known ? " (expected, see README)" : "", o.detail.c_str());
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
