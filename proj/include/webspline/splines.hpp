#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace webspline {

using Point = Eigen::Vector2d;
using Index2 = std::array<int, 2>;

/// Nondecreasing knot sequence together with the spline degree.
///
/// Basis function k is supported on [t_k, t_{k+m+1}]. A "cell" of the knot
/// vector is a knot span [t_l, t_{l+1}) of positive length; cells are numbered
/// consecutively from the left.
class KnotVector {
 public:
  KnotVector(std::vector<double> knots, int degree);

  int degree() const noexcept { return degree_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  int num_basis() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
  int num_cells() const noexcept { return static_cast<int>(cell_span_.size()); }

  // Knot index l of the span [t_l, t_{l+1}) forming cell c.
  int cell_span(int c) const { return cell_span_.at(c); }
  double cell_lo(int c) const { return knots_[cell_span(c)]; }
  double cell_hi(int c) const { return knots_[cell_span(c) + 1]; }

  // Cell containing x. Right-continuous; x equal to the last knot maps to
  // the last cell. Returns -1 outside [t_0, t_last].
  int find_cell(double x) const;

  // Cells [first, last) covered by supp b_k.
  std::pair<int, int> support_cells(int k) const;

  // Multiplicity of the knot value at position i.
  int multiplicity(int i) const;

 private:
  std::vector<double> knots_;
  int degree_;
  std::vector<int> cell_span_;
};

double eval_bspline(const KnotVector& kv, int index, double x);

/// order-th derivative of b_index at x (right limits at interior knots).
double eval_bspline_deriv(const KnotVector& kv, int index, double x, int order);

/// All nonzero B-splines on span `span` and their derivatives up to `nders`
/// at x. Row r holds the r-th derivatives of b_{span-m}, ..., b_{span}.
Eigen::MatrixXd basis_derivatives(const KnotVector& kv, int span, double x, int nders);
// Same, writing into `ders` (resized only when its shape differs).
void basis_derivatives(const KnotVector& kv, int span, double x, int nders, Eigen::MatrixXd& ders);

constexpr int kMaxDegree = 9;

/// Axis-aligned box.
struct Box {
  Point lo;
  Point hi;

  Point center() const { return 0.5 * (lo + hi); }
  Point size() const { return hi - lo; }
  double diameter() const { return size().norm(); }
  double area() const { return size().prod(); }
  bool contains(const Point& x) const {
    return x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1];
  }
};

/// Hausdorff distance between two closed axis-aligned boxes.
double hausdorff_distance(const Box& a, const Box& b);

/// Tensor-product spline grid over a rectangular bounding box.
///
/// Each axis is given by its breakpoints inside the box. The knot vectors
/// are padded with `degree` extra knots on each side (spacing of the end
/// cells) so that every cell of the box carries a full set of degree+1
/// B-splines per axis. Grid cells are the cells of the box only.
class TensorGrid {
 public:
  TensorGrid(std::array<std::vector<double>, 2> breakpoints, std::array<int, 2> degree);

  static TensorGrid uniform(const Box& box, std::array<int, 2> cells, int degree);
  static TensorGrid graded(const Box& box, std::array<int, 2> cells, int degree, double ratio,
                           bool toward_hi);

  const KnotVector& axis(int a) const { return axes_[a]; }
  const std::vector<double>& breakpoints(int a) const { return breakpoints_[a]; }
  std::array<int, 2> degree() const { return {axes_[0].degree(), axes_[1].degree()}; }

  // Cells per axis inside the box.
  std::array<int, 2> cells() const { return {num_cells_[0], num_cells_[1]}; }
  int num_cells() const { return num_cells_[0] * num_cells_[1]; }
  int cell_id(const Index2& c) const { return c[0] * num_cells_[1] + c[1]; }
  Index2 cell_index(int id) const { return {id / num_cells_[1], id % num_cells_[1]}; }
  Box cell_box(const Index2& c) const;
  Box bounding_box() const;

  // Basis functions per axis and in total.
  std::array<int, 2> basis_counts() const { return {axes_[0].num_basis(), axes_[1].num_basis()}; }
  int num_basis() const { return axes_[0].num_basis() * axes_[1].num_basis(); }
  int basis_id(const Index2& k) const { return k[0] * axes_[1].num_basis() + k[1]; }
  Index2 basis_index(int id) const {
    return {id / axes_[1].num_basis(), id % axes_[1].num_basis()};
  }

  // Knot span (in the padded knot vector) of box cell c along axis a.
  int span(int a, int c) const { return axes_[a].cell_span(c + cell_offset_[a]); }
  // Index of the first B-spline that is nonzero on box cell c along axis a.
  int first_basis(int a, int c) const { return span(a, c) - axes_[a].degree(); }
  // Box cells [first, last) along axis a covered by supp b_k (clipped to the box).
  std::pair<int, int> support_cells(int a, int k) const;
  Box support_box(const Index2& k) const;

  // Box cell containing x, or {-1,-1} outside the box.
  Index2 locate(const Point& x) const;

  // Maximum cell diameter.
  double meshsize() const;

  // Global dyadic refinement: every cell is split at its midpoint.
  TensorGrid refined() const;

 private:
  std::array<std::vector<double>, 2> breakpoints_;
  std::array<KnotVector, 2> axes_;
  std::array<int, 2> cell_offset_;
  std::array<int, 2> num_cells_;
};

double eval_tensor_bspline(const TensorGrid& grid, const Index2& k, const Point& x,
                           const Index2& deriv = {0, 0});

/// Tensor-product polynomial in Bernstein form on a reference box. It can be
/// evaluated anywhere; outside the box this is polynomial extrapolation.
class PolynomialPiece {
 public:
  PolynomialPiece(Box box, Eigen::MatrixXd bernstein);

  const Box& box() const noexcept { return box_; }
  std::array<int, 2> degree() const {
    return {static_cast<int>(coeffs_.rows()) - 1, static_cast<int>(coeffs_.cols()) - 1};
  }
  const Eigen::MatrixXd& bernstein() const noexcept { return coeffs_; }

  double operator()(const Point& x) const { return derivative(x, {0, 0}); }
  double derivative(const Point& x, const Index2& order) const;

  // Interpolates samples of f at the tensor Chebyshev nodes of the box.
  template <class F>
  static PolynomialPiece interpolate(const Box& box, std::array<int, 2> degree, F&& f);

  // Tensor Chebyshev nodes of given degree on an interval, ascending.
  static std::vector<double> chebyshev_nodes(double lo, double hi, int degree);

 private:
  static PolynomialPiece from_samples(const Box& box, const Eigen::MatrixXd& samples);

  Box box_;
  Eigen::MatrixXd coeffs_;
};

template <class F>
PolynomialPiece PolynomialPiece::interpolate(const Box& box, std::array<int, 2> degree, F&& f) {
  const auto xs = chebyshev_nodes(box.lo[0], box.hi[0], degree[0]);
  const auto ys = chebyshev_nodes(box.lo[1], box.hi[1], degree[1]);
  Eigen::MatrixXd samples(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) samples(i, j) = f(Point(xs[i], ys[j]));
  return from_samples(box, samples);
}

/// Univariate polynomial piece of b_k on a knot-vector cell, as Bernstein
/// coefficients on that cell.
Eigen::VectorXd local_polynomial_1d(const KnotVector& kv, int k, int cell);

/// Polynomial that coincides with b_k on the interior of box cell `cell`.
PolynomialPiece local_polynomial(const TensorGrid& grid, const Index2& k, const Index2& cell);

/// Weights c_r of the univariate de Boor-Fix functional,
/// lambda_k f = sum_r c_r f^(r)(tau), together with the point tau.
std::pair<double, Eigen::VectorXd> deboor_fix_weights(const KnotVector& kv, int k);

/// Tensor de Boor-Fix functional lambda_k applied to a polynomial piece.
double deboor_fix(const std::array<const KnotVector*, 2>& axes, const Index2& k,
                  const PolynomialPiece& piece);
double deboor_fix(const TensorGrid& grid, const Index2& k, const PolynomialPiece& piece);

}  // namespace webspline
