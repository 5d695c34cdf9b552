#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blowup/domain.hpp"
#include "blowup/potential.hpp"

namespace blowup {

inline constexpr int kSchemaVersion = 1;

enum class Task { RobinMap, GreenEval, FindConfig, Predict, Linearized, Verify };

std::string to_string(Task t);

struct TaskParams {
  // robin_map
  int probe_resolution = 17;
  // green_eval
  std::vector<Point> sources;
  std::vector<Point> probes;
  // find_config / predict
  int n = 1;
  std::vector<Point> init;  // also the points of a predict task
  double tau0 = 1.0;
  bool fix_tau = false;
  int max_iterations = 40;
  bool certify_by_continuation = false;  // predict: rescale a by the τ found from `init`
  std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  // linearized
  int N = 3;
  std::vector<int> k = {0, 1, 2, 3, 4};
  double r_max = 1e3;
  std::optional<double> liouville_tau;
  // verify
  int verify_resolution = 32;
};

struct OutputSpec {
  std::string result = "result.json";
  std::string report = "run_report.json";
  bool csv = true;
};

struct ProblemSpec {
  int schema_version = kSchemaVersion;
  DomainSpec domain;
  PotentialSpec potential_a;
  PotentialSpec potential_V;
  Task task = Task::Verify;
  TaskParams params;
  OutputSpec outputs;
};

/// Throws SpecError naming the offending field ("/params/init/1" etc).
ProblemSpec parse_problem_spec(const nlohmann::json& j);
ProblemSpec load_problem_spec(const std::string& path);
/// Canonical form; parse(to_json(s)) reproduces s exactly.
nlohmann::json to_json(const ProblemSpec& spec);

/// Semantic checks beyond the schema: resolution range, interior points.
void validate_problem_spec(const ProblemSpec& spec);

nlohmann::json potential_to_json(const PotentialSpec& p);
nlohmann::json domain_to_json(const DomainSpec& d);

}  // namespace blowup
