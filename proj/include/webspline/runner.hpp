#pragma once

#include <string>
#include <vector>

#include "webspline/config.hpp"

namespace webspline {

struct CheckResult {
  std::string label;  // e.g. "median eoc(h1) >= 1.75"
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

std::vector<CheckResult> evaluate_checks(const std::vector<CheckSpec>& checks,
                                         const ConvergenceReport& report);

struct RunResult {
  RunConfig config;
  ConvergenceReport report;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool solved() const { return report.failure.empty(); }
  bool passed() const;
};

/// Runs the study of a config and evaluates its checks. Writes nothing.
RunResult run_study(const RunConfig& config);

/// Report document. Wall times live under the top-level "timing" key only.
Json report_json(const RunResult& result);
Json strip_timing(Json report);

/// Aligned text table and long-format CSV (level, h, dofs, norm, error, eoc).
std::string report_table(const RunResult& result);
std::string report_csv(const RunResult& result);

/// Writes report.json, levels.csv and summary.txt into `dir`.
void write_artifacts(const RunResult& result, const std::string& dir);

/// Basis statistics per level (|K|, |I|, |J|, cell counts) without solving.
Json describe(const RunConfig& config);
std::string describe_table(const Json& description);

/// Bundled config files (*.json) of a directory in name order. Throws
/// ConfigurationError when there are none.
std::vector<std::string> suite_configs(const std::string& dir);

}  // namespace webspline
