#pragma once

#include <functional>
#include <vector>

#include "webspline/geometry.hpp"

namespace webspline {

// Treatment of cut sub-cells at the final subdivision depth.
enum class LeafRule {
  Center,  // keep the whole leaf when its center is inside
  Linear,  // clip the leaf by the linearized level set and integrate the polygon
};

struct QuadratureParams {
  int gauss = 3;  // Gauss points per axis
  int depth = 6;  // subdivision depth on boundary cells
  LeafRule leaf = LeafRule::Linear;
};

struct QuadPoint {
  Point x;
  double weight;
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor Gauss rule on a box.
std::vector<QuadPoint> gauss_rule(const Box& box, int n);

/// Quadrature of the part of a boundary cell inside the domain: dyadic
/// subdivision of cut sub-cells down to `depth`; sub-cells entirely inside
/// get the Gauss rule, cut leaves at the final depth follow params.leaf.
std::vector<QuadPoint> cut_cell_rule(const ImplicitDomain& domain, const Box& box,
                                     const QuadratureParams& params);

/// Quadrature points for every non-exterior cell of a grid.
class DomainQuadrature {
 public:
  DomainQuadrature(const ImplicitDomain& domain, const TensorGrid& grid,
                   const CellClassification& cls, QuadratureParams params);

  const QuadratureParams& params() const noexcept { return params_; }
  // Cell ids with at least one quadrature point, ascending.
  const std::vector<int>& cells() const noexcept { return cells_; }
  const std::vector<QuadPoint>& points(int cell_position) const { return points_[cell_position]; }
  std::size_t total_points() const;

  // Sum over cells (ascending order) of per-cell sums.
  double integrate(const std::function<double(const Point&)>& f) const;

 private:
  QuadratureParams params_;
  std::vector<int> cells_;
  std::vector<std::vector<QuadPoint>> points_;
};

double integrate(const ImplicitDomain& domain, const TensorGrid& grid,
                 const CellClassification& cls, const QuadratureParams& params,
                 const std::function<double(const Point&)>& f);

}  // namespace webspline
