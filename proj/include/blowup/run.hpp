#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "blowup/problem_spec.hpp"
#include "blowup/verify_suite.hpp"

namespace blowup {

struct RunOptions {
  std::string out_dir = "out";
  int threads = 1;
  int verbosity = 1;  // 0 quiet, 1 progress, 2 detail
  std::ostream* log = nullptr;
};

struct ManifestEntry {
  std::string file;  // relative to out_dir
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunReport {
  std::string task;
  nlohmann::json spec;      // canonical echo
  nlohmann::json result;    // deterministic payload, written to the result file
  nlohmann::json residuals;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  std::vector<ManifestEntry> manifest;

  bool all_checks_passed() const;
  nlohmann::json to_json() const;
};

/// Runs one task, writes the result JSON, CSV artifacts and the report into
/// out_dir. Module errors are rethrown with the task name prepended.
RunReport run(const ProblemSpec& spec, const RunOptions& opt);

/// Values of a node field on the plane k = const through `through` (nearest
/// node), one row per node: "x,y,z,value". Exactly resolution² rows.
std::string plane_slice_csv(const Grid& grid, const std::vector<double>& values, const Point& through);

}  // namespace blowup
