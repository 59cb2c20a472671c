#pragma once

#include <string>
#include <vector>

#include "webspline/pressure.hpp"

namespace webspline {

enum class ProblemKind { Vcpe, PLaplace, QuasiNewtonian };

const char* to_string(ProblemKind kind);

using MatrixField = std::function<Eigen::Matrix2d(const Point&)>;

/// Exact solution with its data. Scalar problems fill u, grad_u (and a for
/// the Poisson problem); the flow problem fills velocity, velocity_grad
/// (row i = ∇u_i) and pressure.
struct ManufacturedCase {
  std::string name;
  ProblemKind kind = ProblemKind::Vcpe;
  ImplicitDomain domain = ImplicitDomain::disk(Point::Zero(), 1.0);
  std::string description;

  ScalarField u;
  VectorField grad_u;
  ScalarField a;  // Poisson coefficient
  ScalarField f;  // scalar source

  double p = 2.0;  // p-Laplacian exponent

  VectorField velocity;
  MatrixField velocity_grad;
  ScalarField pressure;
  VectorField phi;  // body force
  Viscosity viscosity;

  // Theoretical order of the headline norm and which norm that is.
  double target_order = 1.0;
  std::string target_norm;
  std::string regularity;
};

struct CaseParams {
  int degree = 2;
  double p = 2.0;
  double a0 = 2.0;
  double a_inf = 1.0;
  double r_carreau = 1.5;
};

/// Names accepted by manufactured_case.
std::vector<std::string> case_names();

/// Throws ConfigurationError for an unknown name or parameters the case does
/// not admit.
ManufacturedCase manufactured_case(const std::string& name, const CaseParams& params = {});

}  // namespace webspline
