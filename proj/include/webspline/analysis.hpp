#pragma once

#include <map>
#include <string>
#include <vector>

#include "webspline/cases.hpp"
#include "webspline/solvers.hpp"

namespace webspline {

enum class Norm { L2, H1, W1p, Quasi };

/// Norm of e = u - u_h for u_h = Σ c_i B_i:
///   L2, H1 (full norm), W1p = (∫|e|^p + |∇e|^p)^{1/p},
///   Quasi = (∫ (|∇u| + |∇e|)^{p-2} |∇e|²)^{1/2}.
/// Throws DomainError for p <= 1.
double error_norm(const WebBasis& basis, const DomainQuadrature& quad, const Eigen::VectorXd& coeffs,
                  const ScalarField& u, const VectorField& grad_u, Norm norm, double p = 2.0);

struct ScalarErrors {
  double l2 = 0.0;
  double h1 = 0.0;
  double w1p = 0.0;
  double quasi = 0.0;
};

// All four norms in one pass.
ScalarErrors scalar_errors(const WebBasis& basis, const DomainQuadrature& quad,
                           const Eigen::VectorXd& coeffs, const ScalarField& u,
                           const VectorField& grad_u, double p);

struct FlowErrors {
  double velocity_l2 = 0.0;
  double velocity_h1 = 0.0;
  double pressure_l2 = 0.0;
  double combined = 0.0;  // velocity_h1 + pressure_l2
};

FlowErrors flow_errors(const WebBasis& velocity, const PressureSpace& pressure,
                       const DomainQuadrature& quad, const Eigen::VectorXd& velocity_coeffs,
                       const Eigen::VectorXd& pressure_coeffs, const ManufacturedCase& c);

/// log(e0/e1) / log(h0/h1). NaN if an error is not positive.
double eoc(double e0, double e1, double h0, double h1);
double median(std::vector<double> values);

struct GridSpec {
  std::string kind = "uniform";  // uniform | graded | explicit
  Box box{Point(-1.0, -1.0), Point(1.0, 1.0)};
  std::array<int, 2> cells{8, 8};
  int degree = 2;
  double ratio = 1.15;
  bool toward_hi = true;
  std::array<std::vector<double>, 2> breakpoints;  // explicit
};

/// Level 0 from the generator, level k by k dyadic refinements.
TensorGrid make_grid(const GridSpec& spec, int level);

struct StudySettings {
  GridSpec grid;
  QuadratureParams quadrature{3, 6};
  int classification_samples = 5;
  PressureOptions pressure;
  SolveOptions solver;
  int levels = 4;
  bool infsup = true;
  std::string dump_dir;  // matrix dumps when non-empty
};

struct LevelRecord {
  int level = 0;
  std::array<int, 2> cells{0, 0};
  double h = 0.0;
  BasisSummary basis;
  std::map<std::string, double> errors;
  std::map<std::string, double> diagnostics;
  int iterations = 0;
  std::vector<double> history;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::string case_name;
  std::string problem;
  double target_order = 0.0;
  std::string target_norm;
  std::string regularity;
  std::vector<LevelRecord> levels;
  std::map<std::string, std::vector<double>> eoc;
  std::string failure;  // empty on success
};

/// Solves the case on the level sequence (at least 3 levels) and fills errors
/// and EOC values. Cases without an exact solution report solution norms.
/// A failing level ends the study; the report keeps the finished levels and
/// the failure message.
ConvergenceReport run_convergence(const ManufacturedCase& c, const StudySettings& settings);

/// Recomputes report.eoc from the per-level errors.
void compute_eoc(ConvergenceReport& report);

}  // namespace webspline
