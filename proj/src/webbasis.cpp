#include "webspline/webbasis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "webspline/errors.hpp"

namespace webspline {

double ExtensionTable::max_abs() const {
  double m = 0.0;
  for (const auto& row : entries)
    for (const auto& [i, e] : row) m = std::max(m, std::abs(e));
  return m;
}

std::size_t ExtensionTable::size() const {
  std::size_t n = 0;
  for (const auto& row : entries) n += row.size();
  return n;
}

ExtensionTable build_extension(const TensorGrid& grid, const IndexSets& idx) {
  ExtensionTable table;
  table.entries.resize(idx.outer.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (int j = 0; j < static_cast<int>(idx.outer.size()); ++j) {
    auto& row = table.entries[j];
    row.reserve(idx.outer_inner[j].size());
    for (int i : idx.outer_inner[j]) {
      const PolynomialPiece piece = local_polynomial(grid, idx.inner[i], idx.outer_cell[j]);
      row.emplace_back(i, deboor_fix(grid, idx.outer[j], piece));
    }
  }
  return table;
}

WebBasis::WebBasis(TensorGrid grid, ImplicitDomain domain, int samples_per_axis)
    : grid_(std::move(grid)),
      domain_(std::move(domain)),
      cls_(classify_cells(domain_, grid_, samples_per_axis)),
      idx_(classify_indices(grid_, cls_)),
      ext_(build_extension(grid_, idx_)) {
  center_weight_.resize(idx_.inner.size());
  for (std::size_t i = 0; i < idx_.inner.size(); ++i) {
    center_weight_[i] = weight(domain_, idx_.inner_center[i]);
    if (!(center_weight_[i] > 0.0))
      throw ResolutionError("weight vanishes at the center of an interior cell; refine the grid");
  }

  const auto deg = grid_.degree();
  const int nloc = (deg[0] + 1) * (deg[1] + 1);
  cell_slot_.assign(grid_.num_cells(), -1);
  std::vector<int> order;
  for (int id = 0; id < grid_.num_cells(); ++id)
    if (cls_.kind[id] != CellKind::Exterior) {
      cell_slot_[id] = static_cast<int>(order.size());
      order.push_back(id);
    }
  cell_active_.resize(order.size());
  cell_expansion_.resize(order.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int s = 0; s < static_cast<int>(order.size()); ++s) {
    const Index2 c = grid_.cell_index(order[s]);
    const int f0 = grid_.first_basis(0, c[0]), f1 = grid_.first_basis(1, c[1]);
    // (local column, inner position, coefficient)
    std::vector<std::tuple<int, int, double>> terms;
    for (int a = 0; a <= deg[0]; ++a)
      for (int b = 0; b <= deg[1]; ++b) {
        const int col = a * (deg[1] + 1) + b;
        const int id = grid_.basis_id({f0 + a, f1 + b});
        const int i = idx_.inner_position(id);
        if (i >= 0) {
          terms.emplace_back(col, i, 1.0);
          continue;
        }
        const int j = idx_.outer_position(id);
        if (j < 0) continue;  // cannot happen on a non-exterior cell
        for (const auto& [ii, e] : ext_.entries[j]) terms.emplace_back(col, ii, e);
      }
    std::vector<int> active;
    for (const auto& t : terms) active.push_back(std::get<1>(t));
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(active.size()), nloc);
    for (const auto& [col, i, coef] : terms) {
      const auto row = std::lower_bound(active.begin(), active.end(), i) - active.begin();
      e(row, col) += coef / center_weight_[i];
    }
    cell_active_[s] = std::move(active);
    cell_expansion_[s] = std::move(e);
  }
}

const std::vector<int>& WebBasis::active(int cell_id) const {
  static const std::vector<int> empty;
  const int s = cell_slot_.at(cell_id);
  return s < 0 ? empty : cell_active_[s];
}

Box WebBasis::support(int i) const {
  Box box = grid_.support_box(idx_.inner[i]);
  for (int j : idx_.inner_outer[i]) {
    const Box sj = grid_.support_box(idx_.outer[j]);
    box.lo = box.lo.cwiseMin(sj.lo);
    box.hi = box.hi.cwiseMax(sj.hi);
  }
  return box;
}

WebBasis::Evaluator::Evaluator(const WebBasis& basis) : basis_(&basis) {}

void WebBasis::Evaluator::at(int cell_id, const Point& x) {
  const int slot = basis_->cell_slot_.at(cell_id);
  if (slot < 0) throw DomainError("evaluation on an exterior cell");
  const auto& grid = basis_->grid_;
  const Index2 c = grid.cell_index(cell_id);
  basis_derivatives(grid.axis(0), grid.span(0, c[0]), x[0], 1, d0_);
  basis_derivatives(grid.axis(1), grid.span(1, c[1]), x[1], 1, d1_);
  const Eigen::Index n0 = d0_.cols(), n1 = d1_.cols();
  b_.resize(n0 * n1);
  bx_.resize(n0 * n1);
  by_.resize(n0 * n1);
  for (Eigen::Index a = 0; a < n0; ++a)
    for (Eigen::Index b = 0; b < n1; ++b) {
      const Eigen::Index k = a * n1 + b;
      b_[k] = d0_(0, a) * d1_(0, b);
      bx_[k] = d0_(1, a) * d1_(0, b);
      by_[k] = d0_(0, a) * d1_(1, b);
    }
  const Eigen::MatrixXd& e = basis_->cell_expansion_[slot];
  active_ = &basis_->cell_active_[slot];
  eb_.noalias() = e * b_;
  ebx_.noalias() = e * bx_;
  eby_.noalias() = e * by_;

  // Quadrature leaves may poke slightly outside the domain, so the weight is
  // continued as sign(phi)|phi|^r there instead of being cut off.
  const ImplicitDomain& dom = basis_->domain_;
  const double phi = dom.level(x);
  const double r = dom.exponent();
  const double a = std::abs(phi);
  w_ = std::copysign(std::pow(a, r), phi);
  const Point gw = (r == 1.0 ? 1.0 : (a > 0.0 ? r * std::pow(a, r - 1.0) : 0.0)) * dom.level_gradient(x);
  value_ = w_ * eb_;
  grad_.resize(eb_.size(), 2);
  grad_.col(0) = gw[0] * eb_ + w_ * ebx_;
  grad_.col(1) = gw[1] * eb_ + w_ * eby_;
}

double WebBasis::eval(int i, const Point& x, const Index2& deriv) const {
  if (i < 0 || i >= size()) throw DomainError("web-spline index out of range");
  if (deriv[0] < 0 || deriv[1] < 0) throw DomainError("negative derivative order");
  if (deriv[0] + deriv[1] > 1)
    throw DomainError("web-spline derivatives beyond first order are not supported");
  if (!(domain_.level(x) > 0.0)) return 0.0;
  const Index2 c = grid_.locate(x);
  if (c[0] < 0) return 0.0;
  const int id = grid_.cell_id(c);
  const auto& act = active(id);
  const auto it = std::lower_bound(act.begin(), act.end(), i);
  if (it == act.end() || *it != i) return 0.0;
  Evaluator ev(*this);
  ev.at(id, x);
  const auto row = it - act.begin();
  if (deriv[0] == 1) return ev.gradient()(row, 0);
  if (deriv[1] == 1) return ev.gradient()(row, 1);
  return ev.value()[row];
}

double WebBasis::field(const Eigen::VectorXd& coeffs, const Point& x, Point* gradient) const {
  if (gradient) gradient->setZero();
  if (!(domain_.level(x) > 0.0)) return 0.0;
  const Index2 c = grid_.locate(x);
  if (c[0] < 0) return 0.0;
  const int id = grid_.cell_id(c);
  if (cell_slot_[id] < 0) return 0.0;
  Evaluator ev(*this);
  ev.at(id, x);
  double v = 0.0;
  const auto& act = ev.active();
  for (std::size_t a = 0; a < act.size(); ++a) {
    v += coeffs[act[a]] * ev.value()[a];
    if (gradient) *gradient += coeffs[act[a]] * ev.gradient().row(a).transpose();
  }
  return v;
}

BasisSummary WebBasis::summary() const {
  BasisSummary s;
  s.relevant = static_cast<int>(idx_.relevant.size());
  s.inner = static_cast<int>(idx_.inner.size());
  s.outer = static_cast<int>(idx_.outer.size());
  s.interior_cells = cls_.count(CellKind::Interior);
  s.boundary_cells = cls_.count(CellKind::Boundary);
  s.exterior_cells = cls_.count(CellKind::Exterior);
  s.meshsize = grid_.meshsize();
  s.max_extension = ext_.max_abs();
  double min_alpha = INFINITY;
  for (int i = 0; i < size(); ++i) {
    const Box supp = support(i);
    const Point ext = supp.size();
    const auto [f0, l0] = grid_.support_cells(0, idx_.inner[i][0]);
    const auto [f1, l1] = grid_.support_cells(1, idx_.inner[i][1]);
    double best = 0.0;
    for (int c0 = f0; c0 < l0; ++c0)
      for (int c1 = f1; c1 < l1; ++c1) {
        if (cls_[{c0, c1}] != CellKind::Interior) continue;
        const Point len = grid_.cell_box({c0, c1}).size();
        best = std::max(best, std::min(len[0] / ext[0], len[1] / ext[1]));
      }
    min_alpha = std::min(min_alpha, best);
  }
  s.min_alpha = min_alpha;
  s.alpha_warning = min_alpha < 0.1;
  return s;
}

Eigen::VectorXd project(const WebBasis& basis, const std::function<double(const Point&)>& f) {
  const auto& grid = basis.grid();
  const auto& idx = basis.index_sets();
  const auto& domain = basis.domain();
  Eigen::VectorXd c(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const Box cell = grid.cell_box(idx.inner_cell[i]);
    auto ratio = [&](const Point& x) {
      const double w = weight(domain, x);
      const double v = f(x) / w;
      if (!std::isfinite(v) || std::abs(v) > 1e14) {
        std::ostringstream os;
        os.precision(17);
        os << "f/w blows up near (" << x[0] << ", " << x[1] << ") while projecting web-spline "
           << i << ": f = " << f(x) << ", w = " << w;
        throw NumericalError(os.str());
      }
      return v;
    };
    const PolynomialPiece piece = PolynomialPiece::interpolate(cell, grid.degree(), ratio);
    c[i] = basis.center_weight(i) * deboor_fix(grid, idx.inner[i], piece);
  }
  return c;
}

double jackson_error(const WebBasis& basis, const DomainQuadrature& quad,
                     const std::function<double(const Point&)>& u,
                     const std::function<Point(const Point&)>& grad_u) {
  const Eigen::VectorXd c = project(basis, u);
  WebBasis::Evaluator ev(basis);
  double total = 0.0;
  for (std::size_t n = 0; n < quad.cells().size(); ++n) {
    double sum = 0.0;
    for (const auto& q : quad.points(static_cast<int>(n))) {
      ev.at(quad.cells()[n], q.x);
      double v = 0.0;
      Point g = Point::Zero();
      const auto& act = ev.active();
      for (std::size_t a = 0; a < act.size(); ++a) {
        v += c[act[a]] * ev.value()[a];
        g += c[act[a]] * ev.gradient().row(a).transpose();
      }
      const double e = u(q.x) - v;
      const Point ge = grad_u(q.x) - g;
      sum += q.weight * (e * e + ge.squaredNorm());
    }
    total += sum;
  }
  return std::sqrt(total);
}

}  // namespace webspline
