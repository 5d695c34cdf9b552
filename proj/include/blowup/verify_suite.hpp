#pragma once

#include <string>
#include <vector>

namespace blowup {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured error or quantity
  double tolerance = 0.0;
  std::string detail;
};

/// Identity suite over every module: profile constants, Green oracles,
/// Perron structure, exact linearized modes, the n = 1 rate reduction.
/// Grid-based checks run at `resolution`.
std::vector<CheckResult> run_verify_suite(int resolution, int threads = 1);

}  // namespace blowup
