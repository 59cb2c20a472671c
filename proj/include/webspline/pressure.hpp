#pragma once

#include <functional>
#include <vector>

#include "webspline/assembly.hpp"

namespace webspline {

struct PressureOptions {
  int degree = 0;  // tensor polynomial degree per element
  int macro = 2;   // element = macro x macro block of grid cells
};

/// Discontinuous pressure space. Grid cells are grouped into macro blocks;
/// blocks holding an Interior cell are elements, the remaining cut blocks are
/// merged into the nearest such element. On each element the local basis is
/// orthonormal in L²(element ∩ Ω) for the quadrature given at construction.
class PressureSpace {
 public:
  PressureSpace(const WebBasis& velocity, const DomainQuadrature& quad, PressureOptions opts = {});

  const PressureOptions& options() const noexcept { return opts_; }
  int size() const noexcept { return num_elements() * local_size(); }
  int num_elements() const noexcept { return static_cast<int>(center_.size()); }
  int local_size() const noexcept { return (opts_.degree + 1) * (opts_.degree + 1); }

  // Element of a grid cell, or -1 if the cell carries no pressure.
  int element_of_cell(int cell_id) const { return cell_element_.at(cell_id); }

  // Local basis values of an element at x.
  void eval(int element, const Point& x, Eigen::VectorXd& out) const;
  double value(const Eigen::VectorXd& coeffs, const Point& x) const;

  // m[k] = ∫ ψ_k.
  const Eigen::VectorXd& mean_vector() const noexcept { return mean_; }

  // Coefficients of the element-wise L² projection Π_h p.
  Eigen::VectorXd project(const DomainQuadrature& quad, const ScalarField& p) const;

 private:
  void monomials(int element, const Point& x, Eigen::VectorXd& out) const;

  PressureOptions opts_;
  TensorGrid grid_;
  std::vector<int> cell_element_;
  std::vector<Point> center_;
  std::vector<Point> half_;
  // Per element: inverse Cholesky factor mapping monomials to ψ.
  std::vector<Eigen::MatrixXd> transform_;
  Eigen::VectorXd mean_;
};

/// ‖p − Π_h p‖_{L²} with the projection computed on `quad`.
double pressure_projection_error(const PressureSpace& space, const DomainQuadrature& quad,
                                 const ScalarField& p);

using Viscosity = std::function<double(double)>;

/// a(s) = a_inf + (a0 - a_inf)(1 + s)^{(r-2)/2}.
Viscosity carreau(double a0, double a_inf, double r);

/// Block system [A Bᵀ 0; B 0 m; 0 mᵀ 0] for (u1, u2, p, λ) with
///   A = ∫ a(|D(u_prev)|²) D(u):D(v),  B = -∫ q div v,  m = ∫ q,
/// and right-hand side (∫ φ·v, 0, 0).
struct MixedSystem {
  SparseMatrix K;
  Eigen::VectorXd rhs;
  int velocity_size = 0;  // 2 |I|
  int pressure_size = 0;
};

MixedSystem assemble_mixed(const WebBasis& velocity, const PressureSpace& pressure,
                           const DomainQuadrature& quad, const Viscosity& a_fn,
                           const Eigen::VectorXd& velocity_prev, const VectorField& phi);

/// B alone (pressure rows, stacked velocity columns).
SparseMatrix assemble_divergence(const WebBasis& velocity, const PressureSpace& pressure,
                                 const DomainQuadrature& quad);

/// Velocity Gram matrix in H¹: ∫ ∇u:∇v + u·v, stacked components.
SparseMatrix assemble_velocity_gram(const WebBasis& velocity, const DomainQuadrature& quad);

}  // namespace webspline
