#pragma once

#include <vector>

#include "webspline/pressure.hpp"

namespace webspline {

struct SolveOptions {
  int max_iterations = 20000;       // CG
  double linear_tolerance = 1e-10;  // relative CG residual
  double nonlinear_tolerance = 1e-8;
  int max_newton = 50;  // per continuation stage
  int max_halvings = 20;
  double eps_start = 1e-1;
  double eps_final = 1e-8;
  double p_step = 0.25;  // p-continuation step for p < 1.3 or p > 3
  int max_picard = 200;
  double picard_tolerance = 1e-8;  // relative velocity update
};

struct CgResult {
  int iterations = 0;
  std::vector<double> history;  // relative residual per iteration
};

/// Jacobi-preconditioned conjugate gradients on an SPD matrix; x holds the
/// initial guess on entry. Throws SolverError with the residual history if
/// ‖b − Ax‖ ≤ tol ‖b‖ is not reached within max_iterations.
CgResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double tol, int max_iterations);

struct LinearSolution {
  Eigen::VectorXd coeffs;
  int iterations = 0;
  std::vector<double> history;
};

LinearSolution solve_vcpe(const WebBasis& basis, const DomainQuadrature& quad, const ScalarField& a,
                          const ScalarField& f, const SolveOptions& opts = {},
                          double reaction = 0.0);

struct NewtonRecord {
  double p = 0.0;
  double eps = 0.0;
  double residual = 0.0;  // ‖R‖₂ before the step
  double energy = 0.0;    // J_ε before the step
  double step = 0.0;      // accepted damping factor, 0 on the converged record
};

struct PlapSolution {
  Eigen::VectorXd coeffs;
  int iterations = 0;  // Newton steps over all stages
  std::vector<NewtonRecord> history;
  std::vector<double> final_residuals;  // ‖R‖₂ along the last stage
};

/// Damped Newton for -div(|∇u|^{p-2}∇u) + u = f with ε- and p-continuation,
/// starting from the p = 2 solution.
PlapSolution solve_plap(const WebBasis& basis, const DomainQuadrature& quad, double p,
                        const ScalarField& f, const SolveOptions& opts = {});

struct StokesSolution {
  Eigen::VectorXd velocity;  // (u1, u2) stacked
  Eigen::VectorXd pressure;
  int iterations = 0;
  std::vector<double> updates;
  double max_divergence = 0.0;  // max_q |b(u_h, q)|
  double pressure_mean = 0.0;   // ∫ p_h
};

/// Picard iteration on the frozen viscosity a(|D(u)|²).
StokesSolution solve_quasi_newtonian(const WebBasis& velocity, const PressureSpace& pressure,
                                     const DomainQuadrature& quad, const Viscosity& a_fn,
                                     const VectorField& phi, const SolveOptions& opts = {});

/// Discrete inf-sup constant
///   min over mean-zero q of sup_v b(v, q) / (‖v‖_{H¹} ‖q‖_{L²}),
/// from the smallest eigenvalue of B G⁻¹ Bᵀ on the mean-zero subspace.
double estimate_infsup(const WebBasis& velocity, const PressureSpace& pressure,
                       const DomainQuadrature& quad);

}  // namespace webspline
