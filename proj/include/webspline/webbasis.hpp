#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "webspline/geometry.hpp"
#include "webspline/quadrature.hpp"

namespace webspline {

/// Extension coefficients e_{i,j} = lambda_j p_{i,j} for j in J, i in I(j).
struct ExtensionTable {
  // Per outer position j: (inner position i, e_{i,j}) in the order of I(j).
  std::vector<std::vector<std::pair<int, double>>> entries;

  double max_abs() const;
  std::size_t size() const;
};

ExtensionTable build_extension(const TensorGrid& grid, const IndexSets& idx);

struct BasisSummary {
  int relevant = 0;
  int inner = 0;
  int outer = 0;
  int interior_cells = 0;
  int boundary_cells = 0;
  int exterior_cells = 0;
  double meshsize = 0.0;
  double max_extension = 0.0;
  // Smallest over inner i of the best ratio (per axis) between an interior
  // cell in supp b_i and the extent of supp B_i.
  double min_alpha = 0.0;
  bool alpha_warning = false;
};

/// Weighted extended B-spline basis
///   B_i = w / w(x_i) * (b_i + sum_{j in J(i)} e_{i,j} b_j),  i in I.
class WebBasis {
 public:
  WebBasis(TensorGrid grid, ImplicitDomain domain, int samples_per_axis = 5);

  const TensorGrid& grid() const noexcept { return grid_; }
  const ImplicitDomain& domain() const noexcept { return domain_; }
  const CellClassification& classification() const noexcept { return cls_; }
  const IndexSets& index_sets() const noexcept { return idx_; }
  const ExtensionTable& extension() const noexcept { return ext_; }

  int size() const noexcept { return static_cast<int>(idx_.inner.size()); }
  double center_weight(int i) const { return center_weight_[i]; }

  // Inner positions of web-splines that may be nonzero on a cell (ascending).
  // Empty for exterior cells.
  const std::vector<int>& active(int cell_id) const;

  // Bounding box of supp b_i and the supports of the b_j, j in J(i).
  Box support(int i) const;

  // Value (deriv {0,0}) or first partial derivative of B_i at x; 0 outside
  // the domain.
  double eval(int i, const Point& x, const Index2& deriv = {0, 0}) const;

  BasisSummary summary() const;

  /// Evaluates all web-splines active on one cell. Keeps its own workspace,
  /// so use one evaluator per thread.
  class Evaluator {
   public:
    explicit Evaluator(const WebBasis& basis);

    // x should lie in the closed cell.
    void at(int cell_id, const Point& x);

    const std::vector<int>& active() const { return *active_; }
    const Eigen::VectorXd& value() const { return value_; }
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& gradient() const { return grad_; }
    // Unweighted eb-spline combination E*b at the last point, and w. Outside
    // the domain w is continued smoothly, so values there are not zero.
    const Eigen::VectorXd& extended() const { return eb_; }
    double w() const { return w_; }

   private:
    const WebBasis* basis_;
    const std::vector<int>* active_ = nullptr;
    Eigen::MatrixXd d0_, d1_;
    Eigen::VectorXd b_, bx_, by_;
    Eigen::VectorXd eb_, ebx_, eby_;
    Eigen::VectorXd value_;
    Eigen::Matrix<double, Eigen::Dynamic, 2> grad_;
    double w_ = 0.0;
  };

  // Value and gradient of u_h = sum_i c_i B_i.
  double field(const Eigen::VectorXd& coeffs, const Point& x, Point* gradient = nullptr) const;

 private:
  friend class Evaluator;

  TensorGrid grid_;
  ImplicitDomain domain_;
  CellClassification cls_;
  IndexSets idx_;
  ExtensionTable ext_;
  std::vector<double> center_weight_;
  // Per cell id: slot into the per-cell arrays, -1 for exterior cells.
  std::vector<int> cell_slot_;
  std::vector<std::vector<int>> cell_active_;
  // Rows: active web-splines; columns: local B-splines of the cell
  // (lexicographic); entries already divided by w(x_i).
  std::vector<Eigen::MatrixXd> cell_expansion_;
};

/// Coefficients of the quasi-interpolant P_h f = sum_i (Lambda_i f) B_i with
/// Lambda_i f = w(x_i) lambda_i(f / w). lambda_i acts on the degree-m tensor
/// interpolant of f / w on the interior cell of x_i.
Eigen::VectorXd project(const WebBasis& basis, const std::function<double(const Point&)>& f);

/// H^1 norm of u - P_h u.
double jackson_error(const WebBasis& basis, const DomainQuadrature& quad,
                     const std::function<double(const Point&)>& u,
                     const std::function<Point(const Point&)>& grad_u);

}  // namespace webspline
