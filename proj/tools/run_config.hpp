#pragma once

// Batch-runner configuration: a flat `key = value` text format with repeated
// `[mapping]` blocks. See configs/README.md for the grammar.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqsphere/iteration.hpp"

namespace cqsphere::cli {

/// Parse or validation failure; the message names the line and field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class MethodChoice { kCQ, kShrinking, kBoth };

struct MappingSpec {
  int line = 0;
  std::string type;                  // rotation | identity | chain | contraction
  std::vector<PlaneRotation> rotations;
  std::optional<AmbientVector> target;  // contraction only
  double beta = 0.5;
};

struct RunConfig {
  Eigen::Index dim = 4;
  std::string cap_pole = "e4";
  double cap_radius = 0.0;
  std::vector<MappingSpec> mappings;
  std::vector<double> alphas;  // empty: 1/2 for every map
  double alpha_floor = 0.25;
  std::string schedule = "constant";
  double schedule_amplitude = 0.2;
  bool experimental = false;
  std::string x1 = "random";
  std::optional<double> x1_radius;  // random x1: sampling radius, default cap_radius
  MethodChoice method = MethodChoice::kBoth;
  StopRule stop;
  ProjectionSolver solver = ProjectionSolver::kActiveSet;
  std::uint64_t seed = 0;
  std::string output = "cqsphere";
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Builds and validates the problem. Throws ConfigError naming the field.
Problem build_problem(const RunConfig& cfg);

std::vector<Method> methods_of(const RunConfig& cfg);

/// Trace CSV: n, dist_x1_xn, step_len, res_1..res_r, constraint_count,
/// solver_sweeps; floats with 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t r);

/// {method, stop_reason, iterations, final_point, final_residuals,
///  dist_to_known_PF}; the last is null when F is not known in closed form.
nlohmann::json summary_json(const Problem& p, Method method, const RunResult& result);

/// Closed-form P_F x1 when the family is linear and it lands in the cap.
std::optional<SpherePoint> closed_form_pf(const Problem& p);

/// `run <config>`: 0 when every method converged, 2 on an iteration cap,
/// 1 on any error.
int cmd_run(const RunConfig& cfg, std::ostream& log);

/// `compare <config>`: both methods from the same x1; requires method=both.
int cmd_compare(const RunConfig& cfg, std::ostream& log);

}  // namespace cqsphere::cli
