#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cqsphere/oracle.hpp"

namespace cqsphere::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(int line, std::string_view field, std::string_view what) {
  throw ConfigError(fmt::format("line {}: {}: {}", line, field, what));
}

// A number, `pi`, or a product/quotient of those such as `2*pi/5`.
double parse_real(const std::string& text, int line, std::string_view field) {
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  bool any = false;
  while (pos <= text.size()) {
    const std::size_t next = text.find_first_of("*/", pos);
    const std::string token = trim(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    double factor = 0.0;
    if (token == "pi") {
      factor = std::numbers::pi;
    } else {
      char* end = nullptr;
      factor = std::strtod(token.c_str(), &end);
      if (token.empty() || end != token.c_str() + token.size()) {
        fail(line, field, fmt::format("'{}' is not a number", text));
      }
    }
    value = op == '*' ? value * factor : value / factor;
    any = true;
    if (next == std::string::npos) break;
    op = text[next];
    pos = next + 1;
  }
  if (!any || !std::isfinite(value)) fail(line, field, fmt::format("'{}' is not a number", text));
  return value;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, int line, std::string_view field) {
  std::vector<double> out;
  for (const std::string& item : split_list(text, ',')) out.push_back(parse_real(item, line, field));
  if (out.empty()) fail(line, field, "expected a comma-separated list of numbers");
  return out;
}

long parse_int(const std::string& text, int line, std::string_view field) {
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    fail(line, field, fmt::format("'{}' is not an integer", text));
  }
  return v;
}

bool parse_bool(const std::string& text, int line, std::string_view field) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  fail(line, field, fmt::format("'{}' is not a boolean", text));
}

PlaneRotation parse_rotation(const std::string& plane, double angle, int line,
                             std::string_view field) {
  const std::vector<double> ij = parse_reals(plane, line, field);
  if (ij.size() != 2 || ij[0] != std::floor(ij[0]) || ij[1] != std::floor(ij[1])) {
    fail(line, field, "expected two 1-based axis indices, e.g. '1, 2'");
  }
  auto i = static_cast<Eigen::Index>(ij[0]) - 1;
  auto j = static_cast<Eigen::Index>(ij[1]) - 1;
  if (i > j) {
    std::swap(i, j);
    angle = -angle;
  }
  return PlaneRotation{i, j, angle};
}

// `e<k>` (1-based basis vector) or an explicit comma-separated vector.
AmbientVector parse_point(const std::string& text, Eigen::Index dim, int line,
                          std::string_view field) {
  if (text.size() > 1 && text[0] == 'e') {
    const long k = parse_int(text.substr(1), line, field);
    if (k < 1 || k > dim) fail(line, field, fmt::format("basis index {} outside 1..{}", k, dim));
    return AmbientVector::Unit(dim, k - 1);
  }
  const std::vector<double> v = parse_reals(text, line, field);
  if (static_cast<Eigen::Index>(v.size()) != dim) {
    fail(line, field, fmt::format("expected {} coordinates, got {}", dim, v.size()));
  }
  return Eigen::Map<const AmbientVector>(v.data(), dim);
}

SpherePoint to_sphere(const AmbientVector& v, int line, std::string_view field) {
  try {
    return SpherePoint(v);
  } catch (const Error& e) {
    fail(line, field, e.what());
  }
}

struct PendingMapping {
  MappingSpec spec;
  std::string plane;
  std::optional<double> angle;
  std::string target;
  int plane_line = 0;
};

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, std::pair<std::string, int>> globals;
  std::vector<PendingMapping> pending;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text != "[mapping]") fail(line, text, "unknown section (only [mapping] is allowed)");
      pending.emplace_back();
      pending.back().spec.line = line;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(line, text, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (value.empty()) fail(line, key, "missing value");

    if (!pending.empty()) {
      PendingMapping& m = pending.back();
      if (key == "type") {
        m.spec.type = value;
      } else if (key == "plane") {
        m.plane = value;
        m.plane_line = line;
      } else if (key == "angle") {
        m.angle = parse_real(value, line, key);
      } else if (key == "rotation") {
        // `rotation = i, j, angle` inside a chain block.
        const auto parts = split_list(value, ',');
        if (parts.size() != 3) fail(line, key, "expected 'i, j, angle'");
        m.spec.rotations.push_back(
            parse_rotation(parts[0] + "," + parts[1], parse_real(parts[2], line, key), line, key));
      } else if (key == "target") {
        m.target = value;
      } else if (key == "beta") {
        m.spec.beta = parse_real(value, line, key);
      } else {
        fail(line, key, "not a [mapping] field (global keys must precede the first block)");
      }
      continue;
    }
    if (globals.contains(key)) fail(line, key, "duplicate key");
    globals[key] = {value, line};
  }

  auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
    auto it = globals.find(key);
    if (it == globals.end()) return std::nullopt;
    auto out = it->second;
    globals.erase(it);
    return out;
  };

  if (auto v = take("dim")) {
    const long d = parse_int(v->first, v->second, "dim");
    if (d < 2) fail(v->second, "dim", "must be at least 2");
    cfg.dim = d;
  }
  if (auto v = take("cap_pole")) cfg.cap_pole = v->first;
  if (auto v = take("cap_radius")) {
    cfg.cap_radius = parse_real(v->first, v->second, "cap_radius");
    if (!(cfg.cap_radius > 0.0 && cfg.cap_radius < std::numbers::pi / 4)) {
      fail(v->second, "cap_radius", fmt::format("{} must lie in (0, pi/4)", v->first));
    }
  } else {
    fail(line, "cap_radius", "required key is missing");
  }
  if (auto v = take("alphas")) cfg.alphas = parse_reals(v->first, v->second, "alphas");
  if (auto v = take("alpha_floor")) cfg.alpha_floor = parse_real(v->first, v->second, "alpha_floor");
  if (auto v = take("schedule")) {
    if (v->first != "constant" && v->first != "oscillating") {
      fail(v->second, "schedule", "expected 'constant' or 'oscillating'");
    }
    cfg.schedule = v->first;
  }
  if (auto v = take("schedule_amplitude")) {
    cfg.schedule_amplitude = parse_real(v->first, v->second, "schedule_amplitude");
  }
  if (auto v = take("experimental")) cfg.experimental = parse_bool(v->first, v->second, "experimental");
  if (auto v = take("x1")) cfg.x1 = v->first;
  if (auto v = take("x1_radius")) cfg.x1_radius = parse_real(v->first, v->second, "x1_radius");
  if (auto v = take("method")) {
    if (v->first == "cq") {
      cfg.method = MethodChoice::kCQ;
    } else if (v->first == "shrinking") {
      cfg.method = MethodChoice::kShrinking;
    } else if (v->first == "both") {
      cfg.method = MethodChoice::kBoth;
    } else {
      fail(v->second, "method", "expected 'cq', 'shrinking' or 'both'");
    }
  }
  if (auto v = take("eps_step")) cfg.stop.eps_step = parse_real(v->first, v->second, "eps_step");
  if (auto v = take("eps_residual")) {
    cfg.stop.eps_residual = parse_real(v->first, v->second, "eps_residual");
  }
  if (auto v = take("max_iter")) {
    cfg.stop.max_iter = static_cast<int>(parse_int(v->first, v->second, "max_iter"));
  }
  if (auto v = take("solver")) {
    if (v->first == "active-set") {
      cfg.solver = ProjectionSolver::kActiveSet;
    } else if (v->first == "dykstra") {
      cfg.solver = ProjectionSolver::kDykstra;
    } else {
      fail(v->second, "solver", "expected 'active-set' or 'dykstra'");
    }
  }
  if (auto v = take("seed")) {
    const long s = parse_int(v->first, v->second, "seed");
    if (s < 0) fail(v->second, "seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("output")) cfg.output = v->first;
  if (!globals.empty()) {
    const auto& [key, where] = *globals.begin();
    fail(where.second, key, "unknown key");
  }
  if (cfg.stop.eps_step <= 0.0 || cfg.stop.eps_residual <= 0.0 || cfg.stop.max_iter <= 0) {
    fail(line, "stop rule", "eps_step, eps_residual and max_iter must be positive");
  }

  if (pending.empty()) fail(line, "[mapping]", "at least one mapping block is required");
  for (PendingMapping& m : pending) {
    MappingSpec& spec = m.spec;
    if (spec.type == "rotation") {
      if (m.plane.empty() || !m.angle) fail(spec.line, "rotation", "needs 'plane' and 'angle'");
      spec.rotations = {parse_rotation(m.plane, *m.angle, m.plane_line, "plane")};
    } else if (spec.type == "identity") {
      spec.rotations.clear();
    } else if (spec.type == "chain") {
      if (spec.rotations.empty()) fail(spec.line, "chain", "needs at least one 'rotation' line");
    } else if (spec.type == "contraction") {
      if (m.target.empty()) fail(spec.line, "contraction", "needs a 'target'");
      spec.target = parse_point(m.target, cfg.dim, spec.line, "target");
    } else {
      fail(spec.line, "type",
           fmt::format("'{}' is not one of rotation, identity, chain, contraction", spec.type));
    }
    for (const PlaneRotation& r : spec.rotations) {
      if (r.i < 0 || r.j >= cfg.dim || r.i == r.j) {
        fail(spec.line, "plane", fmt::format("axes must be distinct and within 1..{}", cfg.dim));
      }
    }
    cfg.mappings.push_back(std::move(spec));
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  return parse_config(in);
}

Problem build_problem(const RunConfig& cfg) {
  const SpherePoint pole = to_sphere(parse_point(cfg.cap_pole, cfg.dim, 0, "cap_pole"), 0, "cap_pole");

  std::vector<Mapping> maps;
  for (const MappingSpec& spec : cfg.mappings) {
    if (spec.type == "contraction") {
      maps.emplace_back(GeodesicContraction{to_sphere(*spec.target, spec.line, "target"), spec.beta});
    } else if (spec.type == "rotation") {
      maps.emplace_back(spec.rotations.front());
    } else {
      maps.emplace_back(RotationChain{spec.rotations});
    }
  }
  const std::size_t r = maps.size();

  std::optional<MappingFamily> family;
  try {
    if (cfg.schedule == "oscillating") {
      family.emplace(maps, oscillating_schedule(r, cfg.schedule_amplitude), cfg.alpha_floor,
                     cfg.experimental);
      family->alphas(1);
      family->alphas(2);
    } else {
      std::vector<double> alphas = cfg.alphas.empty() ? std::vector<double>(r, 0.5) : cfg.alphas;
      family.emplace(maps, alphas, cfg.alpha_floor, cfg.experimental);
    }
  } catch (const Error& e) {
    throw ConfigError(fmt::format("mappings/alphas: {}", e.what()));
  }

  SpherePoint x1 = pole;
  if (cfg.x1 == "random") {
    x1 = random_point_in_cap(pole, cfg.x1_radius.value_or(cfg.cap_radius), cfg.seed);
  } else {
    x1 = to_sphere(parse_point(cfg.x1, cfg.dim, 0, "x1"), 0, "x1");
  }

  const bool linear = std::all_of(maps.begin(), maps.end(), is_isometry);
  try {
    if (linear) return make_problem(pole, cfg.cap_radius, std::move(*family), x1);
    Problem p{pole, cfg.cap_radius, std::move(*family), x1, std::nullopt};
    p.validate();
    return p;
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("problem: {}", e.what()));
  }
}

std::vector<Method> methods_of(const RunConfig& cfg) {
  switch (cfg.method) {
    case MethodChoice::kCQ:
      return {Method::kCQ};
    case MethodChoice::kShrinking:
      return {Method::kShrinking};
    case MethodChoice::kBoth:
      break;
  }
  return {Method::kCQ, Method::kShrinking};
}

void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t r) {
  out << "n,dist_x1_xn,step_len";
  for (std::size_t i = 1; i <= r; ++i) out << ",res_" << i;
  out << ",constraint_count,solver_sweeps\n";
  for (const TraceRecord& rec : trace) {
    fmt::print(out, "{},{:.17g},{:.17g}", rec.n, rec.dist_x1_xn, rec.step_len);
    for (double res : rec.residuals) fmt::print(out, ",{:.17g}", res);
    fmt::print(out, ",{},{}\n", rec.constraint_count, rec.solver_sweeps);
  }
}

std::optional<SpherePoint> closed_form_pf(const Problem& p) {
  if (!p.known_fixed_basis) return std::nullopt;
  try {
    SpherePoint pf = oracle::subspace_project(p.x1, *p.known_fixed_basis);
    if (Halfspace::cap(p.cap_pole, p.cap_radius).slack(pf) < -1e-12) return std::nullopt;
    return pf;
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

nlohmann::json summary_json(const Problem& p, Method method, const RunResult& result) {
  const AmbientVector& x = result.final_point.coords();
  nlohmann::json j;
  j["method"] = std::string(to_string(method));
  j["stop_reason"] = std::string(to_string(result.reason));
  j["iterations"] = result.trace.size();
  j["final_point"] = std::vector<double>(x.data(), x.data() + x.size());
  j["final_residuals"] = residuals(p.family, result.final_point);
  if (auto pf = closed_form_pf(p)) {
    j["dist_to_known_PF"] = distance(result.final_point, *pf);
  } else {
    j["dist_to_known_PF"] = nullptr;
  }
  return j;
}

namespace {

struct MethodOutcome {
  Method method;
  std::optional<RunResult> result;
  std::string error;
};

MethodOutcome run_one(const Problem& p, Method method, const RunConfig& cfg) {
  ProjectOptions opts;
  opts.solver = cfg.solver;
  try {
    return {method, run(p, method, cfg.stop, opts), {}};
  } catch (const Error& e) {
    return {method, std::nullopt, e.what()};
  }
}

std::filesystem::path output_path(const RunConfig& cfg, std::string_view suffix) {
  return cfg.output + std::string(suffix);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << contents;
}

void write_outputs(const RunConfig& cfg, const Problem& p, const MethodOutcome& o) {
  const std::string name(to_string(o.method));
  std::ostringstream csv;
  write_trace_csv(csv, o.result->trace, p.family.size());
  write_file(output_path(cfg, "_" + name + "_trace.csv"), csv.str());
  write_file(output_path(cfg, "_" + name + "_summary.json"),
             summary_json(p, o.method, *o.result).dump(2) + "\n");
}

int exit_code(const std::vector<MethodOutcome>& outcomes) {
  int code = 0;
  for (const MethodOutcome& o : outcomes) {
    if (!o.result) return 1;
    if (o.result->reason == StopReason::kIterationCap) code = 2;
  }
  return code;
}

std::vector<MethodOutcome> run_methods(const Problem& p, const RunConfig& cfg,
                                       const std::vector<Method>& methods) {
  // Independent runs; results are written afterwards in method order.
  std::vector<std::future<MethodOutcome>> jobs;
  for (Method m : methods) {
    jobs.push_back(std::async(std::launch::async, [&p, &cfg, m] { return run_one(p, m, cfg); }));
  }
  std::vector<MethodOutcome> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

void report(std::ostream& log, const MethodOutcome& o) {
  const std::string name(to_string(o.method));
  if (!o.result) {
    fmt::print(log, "{}: error: {}\n", name, o.error);
    return;
  }
  fmt::print(log, "{}: {} after {} iterations\n", name, to_string(o.result->reason),
             o.result->trace.size());
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  const Problem p = build_problem(cfg);
  const std::vector<MethodOutcome> outcomes = run_methods(p, cfg, methods_of(cfg));
  for (const MethodOutcome& o : outcomes) {
    report(log, o);
    if (o.result) write_outputs(cfg, p, o);
  }
  return exit_code(outcomes);
}

int cmd_compare(const RunConfig& cfg, std::ostream& log) {
  if (cfg.method != MethodChoice::kBoth) {
    throw ConfigError("method: compare requires 'method = both'");
  }
  const Problem p = build_problem(cfg);
  const std::vector<MethodOutcome> outcomes = run_methods(p, cfg, methods_of(cfg));

  nlohmann::json cmp;
  cmp["seed"] = cfg.seed;
  cmp["x1"] = std::vector<double>(p.x1.coords().data(), p.x1.coords().data() + p.dim());
  for (const MethodOutcome& o : outcomes) {
    report(log, o);
    nlohmann::json entry;
    const std::string name(to_string(o.method));
    if (!o.result) {
      entry["error"] = o.error;
      cmp["methods"][name] = entry;
      continue;
    }
    write_outputs(cfg, p, o);
    const RunResult& res = *o.result;
    long sweeps = 0;
    for (const TraceRecord& rec : res.trace) sweeps += rec.solver_sweeps;
    entry["stop_reason"] = std::string(to_string(res.reason));
    entry["iterations_to_tolerance"] =
        res.reason == StopReason::kConverged ? nlohmann::json(res.trace.size()) : nlohmann::json();
    entry["iterations"] = res.trace.size();
    entry["final_residuals"] = residuals(p.family, res.final_point);
    entry["total_solver_sweeps"] = sweeps;
    entry["fejer_audit"] = fejer_audit(res.trace);
    cmp["methods"][name] = entry;
  }
  if (outcomes.size() == 2 && outcomes[0].result && outcomes[1].result) {
    cmp["final_point_distance"] =
        distance(outcomes[0].result->final_point, outcomes[1].result->final_point);
  }
  write_file(output_path(cfg, "_compare.json"), cmp.dump(2) + "\n");
  return exit_code(outcomes);
}

}  // namespace cqsphere::cli
