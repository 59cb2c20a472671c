#pragma once

#include <functional>
#include <iosfwd>

#include <Eigen/Sparse>

#include "webspline/webbasis.hpp"

namespace webspline {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

struct AssembledSystem {
  SparseMatrix A;
  Eigen::VectorXd F;
};

/// A[j,i] = ∫ a ∇B_j·∇B_i + reaction ∫ B_j B_i,  F[j] = ∫ f B_j.
/// Throws DomainError if a <= 0 at a quadrature point.
AssembledSystem assemble_vcpe(const WebBasis& basis, const DomainQuadrature& quad,
                              const ScalarField& a, const ScalarField& f, double reaction = 0.0);

/// F[j] = ∫ f B_j.
Eigen::VectorXd assemble_load(const WebBasis& basis, const DomainQuadrature& quad,
                              const ScalarField& f);

/// F[j] = -∫ d·∇B_j, the weak form of the load f = div d.
Eigen::VectorXd assemble_dipole_rhs(const WebBasis& basis, const DomainQuadrature& quad,
                                    const VectorField& d);

/// M[j,i] = ∫ B_j B_i.
SparseMatrix assemble_mass(const WebBasis& basis, const DomainQuadrature& quad);

/// Residual and Jacobian of the regularized p-Laplacian with reaction term
///   R[j] = ∫ μ_ε(|∇u|) ∇u·∇B_j + u B_j - f B_j,  μ_ε(s) = (ε² + s²)^{(p-2)/2}.
struct PlapSystem {
  SparseMatrix jacobian;  // empty unless requested
  Eigen::VectorXd residual;
};

PlapSystem assemble_plap(const WebBasis& basis, const DomainQuadrature& quad,
                         const Eigen::VectorXd& coeffs, double p, double eps, const ScalarField& f,
                         bool with_jacobian = true);

/// J_ε(u) = ∫ (1/p)(ε² + |∇u|²)^{p/2} + u²/2 - f u, whose gradient is R.
double plap_energy(const WebBasis& basis, const DomainQuadrature& quad,
                   const Eigen::VectorXd& coeffs, double p, double eps, const ScalarField& f);

/// Writes "rows cols nnz" followed by one "i j value" line per nonzero
/// (0-based, column-major order).
void write_triplets(std::ostream& os, const SparseMatrix& m);

}  // namespace webspline
