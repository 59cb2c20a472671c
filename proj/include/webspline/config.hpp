#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "webspline/analysis.hpp"

namespace webspline {

using Json = nlohmann::json;

/// One acceptance assertion evaluated on a finished report.
///   eoc              statistic of the EOC sequence of error `quantity` >= bound
///   diagnostic_eoc   same for a diagnostic
///   diagnostic_max   max over levels of |diagnostic| <= bound
///   diagnostic_ratio min / max over levels of a positive diagnostic >= bound
///   error_ratio      max over levels of error / diagnostic `reference` <= bound
struct CheckSpec {
  std::string kind;
  std::string quantity;
  std::string reference;
  std::string statistic = "median";  // median | min | last
  double bound = 0.0;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Vcpe;
  std::string case_name;  // empty for a custom source
  double p = 2.0;
  double a0 = 2.0;
  double a_inf = 1.0;
  double r_carreau = 1.5;
  // Custom data: constant scalar source (vcpe, plap) or constant body force.
  std::optional<double> source;
  std::optional<Point> body_force;
  double coefficient = 1.0;  // constant a for a custom vcpe source
};

struct RunConfig {
  std::string name;
  Json domain;  // primitive tree; null means the case's own domain
  double exponent = 1.0;
  ProblemSpec problem;
  StudySettings study;
  std::vector<CheckSpec> checks;
  std::string output_dir;
  bool dump_matrices = false;
};

/// Validates a config document. Unknown keys, wrong types and inadmissible
/// values throw ConfigurationError naming the offending key.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

/// Effective config with every default materialized; parse_config of the
/// result gives the same config back.
Json to_json(const RunConfig& config);

/// Domain trees: {"disk": {"center": [x, y], "radius": r}},
/// {"box": {"lo": [..], "hi": [..]}}, {"half_plane": {"normal": [..], "offset": c}},
/// {"and": [a, b]}, {"or": [a, b]}, {"not": a}.
ImplicitDomain domain_from_json(const Json& tree, double exponent = 1.0);
Json domain_to_json(const ImplicitDomain& domain);

/// The case to solve, with the configured domain and weight exponent.
ManufacturedCase build_case(const RunConfig& config);

/// Sets a dotted key ("quadrature.depth") in a config document. The value is
/// parsed as JSON when possible and kept as a string otherwise.
void apply_override(Json& doc, const std::string& assignment);

}  // namespace webspline
