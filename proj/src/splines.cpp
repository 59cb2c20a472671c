#include "webspline/splines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "webspline/errors.hpp"

namespace webspline {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Cox-de Boor on the local knots t[0..deg+1]. With `left` set, degree-0
// pieces are the half-open intervals (t_i, t_{i+1}] (used at the final knot).
double cox_de_boor(const double* t, int deg, double x, bool left) {
  std::vector<double> n(deg + 1);
  for (int i = 0; i <= deg; ++i) {
    const bool in = left ? (t[i] < x && x <= t[i + 1]) : (t[i] <= x && x < t[i + 1]);
    n[i] = in ? 1.0 : 0.0;
  }
  for (int d = 1; d <= deg; ++d) {
    for (int i = 0; i + d <= deg; ++i) {
      double v = 0.0;
      const double d1 = t[i + d] - t[i];
      const double d2 = t[i + d + 1] - t[i + 1];
      if (d1 > 0.0) v += (x - t[i]) / d1 * n[i];
      if (d2 > 0.0) v += (t[i + d + 1] - x) / d2 * n[i + 1];
      n[i] = v;
    }
  }
  return n[0];
}

double deriv_recursive(const double* t, int deg, double x, int order, bool left) {
  if (order == 0) return cox_de_boor(t, deg, x, left);
  if (order > deg) return 0.0;
  double v = 0.0;
  const double d1 = t[deg] - t[0];
  const double d2 = t[deg + 1] - t[1];
  if (d1 > 0.0) v += deriv_recursive(t, deg - 1, x, order - 1, left) / d1;
  if (d2 > 0.0) v -= deriv_recursive(t + 1, deg - 1, x, order - 1, left) / d2;
  return deg * v;
}

void check_index(const KnotVector& kv, int index) {
  if (index < 0 || index >= kv.num_basis())
    throw DomainError("B-spline index " + std::to_string(index) + " out of range [0, " +
                      std::to_string(kv.num_basis()) + ")");
}

// De Casteljau evaluation of a univariate Bernstein polynomial at s.
double de_casteljau(std::vector<double> c, double s) {
  const int n = static_cast<int>(c.size());
  for (int r = 1; r < n; ++r)
    for (int i = 0; i < n - r; ++i) c[i] = (1.0 - s) * c[i] + s * c[i + 1];
  return n == 0 ? 0.0 : c[0];
}

double bernstein_poly(int k, int m, double s) {
  return binomial(m, k) * std::pow(s, k) * std::pow(1.0 - s, m - k);
}

}  // namespace

// ---------------------------------------------------------------------------
// KnotVector

KnotVector::KnotVector(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0) throw DomainError("negative spline degree");
  if (static_cast<int>(knots_.size()) < degree_ + 2)
    throw DomainError("knot vector needs at least degree+2 knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i])) throw DomainError("non-finite knot");
    if (i > 0 && knots_[i] < knots_[i - 1]) throw DomainError("knots must be nondecreasing");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i)
    if (multiplicity(static_cast<int>(i)) > degree_ + 1)
      throw DomainError("knot multiplicity exceeds degree+1");
  for (std::size_t l = 0; l + 1 < knots_.size(); ++l)
    if (knots_[l] < knots_[l + 1]) cell_span_.push_back(static_cast<int>(l));
  if (cell_span_.empty()) throw DomainError("knot vector has no cell of positive length");
}

int KnotVector::multiplicity(int i) const {
  const double v = knots_.at(i);
  return static_cast<int>(std::count(knots_.begin(), knots_.end(), v));
}

int KnotVector::find_cell(double x) const {
  if (!(x >= knots_.front() && x <= knots_.back())) return -1;
  // First cell whose right end exceeds x.
  auto it = std::upper_bound(cell_span_.begin(), cell_span_.end(), x,
                             [&](double v, int l) { return v < knots_[l + 1]; });
  if (it == cell_span_.end()) return num_cells() - 1;
  return static_cast<int>(it - cell_span_.begin());
}

std::pair<int, int> KnotVector::support_cells(int k) const {
  const double a = knots_[k];
  const double b = knots_[k + degree_ + 1];
  int first = num_cells(), last = 0;
  for (int c = 0; c < num_cells(); ++c) {
    if (cell_lo(c) >= a && cell_hi(c) <= b) {
      first = std::min(first, c);
      last = std::max(last, c + 1);
    }
  }
  if (first >= last) return {0, 0};
  return {first, last};
}

double eval_bspline(const KnotVector& kv, int index, double x) {
  return eval_bspline_deriv(kv, index, x, 0);
}

double eval_bspline_deriv(const KnotVector& kv, int index, double x, int order) {
  check_index(kv, index);
  if (order < 0) throw DomainError("negative derivative order");
  if (!std::isfinite(x)) throw DomainError("non-finite evaluation point");
  const int m = kv.degree();
  const double* t = kv.knots().data() + index;
  if (x < t[0] || x > t[m + 1]) return 0.0;
  const bool at_end = x == kv.knots().back();
  return deriv_recursive(t, m, x, order, at_end);
}

Eigen::MatrixXd basis_derivatives(const KnotVector& kv, int span, double x, int nders) {
  Eigen::MatrixXd ders;
  basis_derivatives(kv, span, x, nders, ders);
  return ders;
}

void basis_derivatives(const KnotVector& kv, int span, double x, int nders, Eigen::MatrixXd& ders) {
  const int p = kv.degree();
  if (p > kMaxDegree) throw DomainError("spline degree exceeds the supported maximum");
  if (span < p - 1 || span + p > static_cast<int>(kv.knots().size()) - 1)
    throw DomainError("knot span out of range");
  const auto& U = kv.knots();
  const int n = std::min(nders, p);
  ders.resize(nders + 1, p + 1);
  ders.setZero();

  double ndu[kMaxDegree + 1][kMaxDegree + 1];
  double left[kMaxDegree + 1], right[kMaxDegree + 1];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu[j][p];

  double a[2][kMaxDegree + 1];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double f = p;
  for (int k = 1; k <= n; ++k) {
    ders.row(k) *= f;
    f *= (p - k);
  }
}

double hausdorff_distance(const Box& a, const Box& b) {
  auto point_to_box = [](const Point& p, const Box& box) {
    const Point d = (box.lo - p).cwiseMax(p - box.hi).cwiseMax(Point::Zero());
    return d.norm();
  };
  auto directed = [&](const Box& from, const Box& to) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Point corner((i & 1) ? from.hi[0] : from.lo[0], (i & 2) ? from.hi[1] : from.lo[1]);
      d = std::max(d, point_to_box(corner, to));
    }
    return d;
  };
  return std::max(directed(a, b), directed(b, a));
}

// ---------------------------------------------------------------------------
// TensorGrid

namespace {

KnotVector padded_knots(const std::vector<double>& bp, int degree) {
  if (bp.size() < 2) throw DomainError("an axis needs at least two breakpoints");
  if (!(bp.front() < bp.back())) throw DomainError("breakpoints must span a positive length");
  auto first_gap = std::find_if(bp.begin(), bp.end(), [&](double v) { return v > bp.front(); });
  auto last_gap = std::find_if(bp.rbegin(), bp.rend(), [&](double v) { return v < bp.back(); });
  const double d0 = *first_gap - bp.front();
  const double d1 = bp.back() - *last_gap;
  std::vector<double> knots;
  knots.reserve(bp.size() + 2 * degree);
  for (int i = degree; i >= 1; --i) knots.push_back(bp.front() - i * d0);
  knots.insert(knots.end(), bp.begin(), bp.end());
  for (int i = 1; i <= degree; ++i) knots.push_back(bp.back() + i * d1);
  return KnotVector(std::move(knots), degree);
}

std::vector<double> uniform_breakpoints(double lo, double hi, int n) {
  if (n < 1) throw DomainError("need at least one cell per axis");
  std::vector<double> bp(n + 1);
  for (int i = 0; i <= n; ++i) bp[i] = lo + (hi - lo) * i / n;
  bp.back() = hi;
  return bp;
}

}  // namespace

TensorGrid::TensorGrid(std::array<std::vector<double>, 2> breakpoints, std::array<int, 2> degree)
    : breakpoints_(std::move(breakpoints)),
      axes_{padded_knots(breakpoints_[0], degree[0]), padded_knots(breakpoints_[1], degree[1])} {
  for (int a = 0; a < 2; ++a) {
    cell_offset_[a] = degree[a];
    num_cells_[a] = axes_[a].num_cells() - 2 * degree[a];
  }
}

TensorGrid TensorGrid::uniform(const Box& box, std::array<int, 2> cells, int degree) {
  return TensorGrid({uniform_breakpoints(box.lo[0], box.hi[0], cells[0]),
                     uniform_breakpoints(box.lo[1], box.hi[1], cells[1])},
                    {degree, degree});
}

TensorGrid TensorGrid::graded(const Box& box, std::array<int, 2> cells, int degree, double ratio,
                              bool toward_hi) {
  if (!(ratio > 0.0)) throw DomainError("grading ratio must be positive");
  std::array<std::vector<double>, 2> bp;
  for (int a = 0; a < 2; ++a) {
    const int n = cells[a];
    if (n < 1) throw DomainError("need at least one cell per axis");
    std::vector<double> widths(n);
    for (int i = 0; i < n; ++i) widths[i] = std::pow(ratio, toward_hi ? i : n - 1 - i);
    double total = 0.0;
    for (double w : widths) total += w;
    const double len = box.hi[a] - box.lo[a];
    bp[a].push_back(box.lo[a]);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += widths[i];
      bp[a].push_back(box.lo[a] + len * acc / total);
    }
    bp[a].back() = box.hi[a];
  }
  return TensorGrid(std::move(bp), {degree, degree});
}

Box TensorGrid::cell_box(const Index2& c) const {
  const int s0 = span(0, c[0]), s1 = span(1, c[1]);
  return {Point(axes_[0].knots()[s0], axes_[1].knots()[s1]),
          Point(axes_[0].knots()[s0 + 1], axes_[1].knots()[s1 + 1])};
}

Box TensorGrid::bounding_box() const {
  return {Point(breakpoints_[0].front(), breakpoints_[1].front()),
          Point(breakpoints_[0].back(), breakpoints_[1].back())};
}

std::pair<int, int> TensorGrid::support_cells(int a, int k) const {
  auto [f, l] = axes_[a].support_cells(k);
  f = std::clamp(f - cell_offset_[a], 0, num_cells_[a]);
  l = std::clamp(l - cell_offset_[a], 0, num_cells_[a]);
  return {f, std::max(f, l)};
}

Box TensorGrid::support_box(const Index2& k) const {
  const int m0 = axes_[0].degree(), m1 = axes_[1].degree();
  return {Point(axes_[0].knots()[k[0]], axes_[1].knots()[k[1]]),
          Point(axes_[0].knots()[k[0] + m0 + 1], axes_[1].knots()[k[1] + m1 + 1])};
}

Index2 TensorGrid::locate(const Point& x) const {
  Index2 c{-1, -1};
  for (int a = 0; a < 2; ++a) {
    const auto& bp = breakpoints_[a];
    if (!(x[a] >= bp.front() && x[a] <= bp.back())) return {-1, -1};
    int cell = axes_[a].find_cell(x[a]) - cell_offset_[a];
    c[a] = std::clamp(cell, 0, num_cells_[a] - 1);
  }
  return c;
}

double TensorGrid::meshsize() const {
  std::array<double, 2> widest{0.0, 0.0};
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < num_cells_[a]; ++c) {
      const int s = span(a, c);
      widest[a] = std::max(widest[a], axes_[a].knots()[s + 1] - axes_[a].knots()[s]);
    }
  return std::hypot(widest[0], widest[1]);
}

TensorGrid TensorGrid::refined() const {
  std::array<std::vector<double>, 2> bp;
  for (int a = 0; a < 2; ++a) {
    const auto& old = breakpoints_[a];
    for (std::size_t i = 0; i < old.size(); ++i) {
      if (i > 0 && old[i] > old[i - 1]) bp[a].push_back(0.5 * (old[i - 1] + old[i]));
      bp[a].push_back(old[i]);
    }
  }
  return TensorGrid(std::move(bp), degree());
}

double eval_tensor_bspline(const TensorGrid& grid, const Index2& k, const Point& x,
                           const Index2& deriv) {
  return eval_bspline_deriv(grid.axis(0), k[0], x[0], deriv[0]) *
         eval_bspline_deriv(grid.axis(1), k[1], x[1], deriv[1]);
}

// ---------------------------------------------------------------------------
// PolynomialPiece

PolynomialPiece::PolynomialPiece(Box box, Eigen::MatrixXd bernstein)
    : box_(std::move(box)), coeffs_(std::move(bernstein)) {
  if (!(box_.hi[0] > box_.lo[0] && box_.hi[1] > box_.lo[1]))
    throw DomainError("polynomial piece needs a cell of positive size");
  if (coeffs_.rows() < 1 || coeffs_.cols() < 1) throw DomainError("empty Bernstein coefficients");
}

double PolynomialPiece::derivative(const Point& x, const Index2& order) const {
  if (order[0] < 0 || order[1] < 0) throw DomainError("negative derivative order");
  Eigen::MatrixXd c = coeffs_;
  const Point len = box_.size();
  for (int r = 0; r < order[0]; ++r) {
    const int n = static_cast<int>(c.rows()) - 1;
    if (n == 0) return 0.0;
    Eigen::MatrixXd d = (c.bottomRows(n) - c.topRows(n)) * (n / len[0]);
    c = std::move(d);
  }
  for (int r = 0; r < order[1]; ++r) {
    const int n = static_cast<int>(c.cols()) - 1;
    if (n == 0) return 0.0;
    Eigen::MatrixXd d = (c.rightCols(n) - c.leftCols(n)) * (n / len[1]);
    c = std::move(d);
  }
  const double s0 = (x[0] - box_.lo[0]) / len[0];
  const double s1 = (x[1] - box_.lo[1]) / len[1];
  std::vector<double> rows(c.rows());
  std::vector<double> tmp(c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) tmp[j] = c(i, j);
    rows[i] = de_casteljau(tmp, s1);
  }
  return de_casteljau(rows, s0);
}

std::vector<double> PolynomialPiece::chebyshev_nodes(double lo, double hi, int degree) {
  std::vector<double> nodes(degree + 1);
  for (int i = 0; i <= degree; ++i) {
    const double t = -std::cos((2.0 * i + 1.0) * M_PI / (2.0 * (degree + 1)));
    nodes[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
  }
  return nodes;
}

PolynomialPiece PolynomialPiece::from_samples(const Box& box, const Eigen::MatrixXd& samples) {
  auto collocation = [](double lo, double hi, int m) {
    const auto nodes = chebyshev_nodes(lo, hi, m);
    Eigen::MatrixXd v(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
      for (int k = 0; k <= m; ++k) v(i, k) = bernstein_poly(k, m, (nodes[i] - lo) / (hi - lo));
    return v;
  };
  const int m0 = static_cast<int>(samples.rows()) - 1;
  const int m1 = static_cast<int>(samples.cols()) - 1;
  const Eigen::MatrixXd vx = collocation(box.lo[0], box.hi[0], m0);
  const Eigen::MatrixXd vy = collocation(box.lo[1], box.hi[1], m1);
  // samples = vx * C * vy^T
  const Eigen::MatrixXd tmp = vx.partialPivLu().solve(samples);
  const Eigen::MatrixXd c = vy.partialPivLu().solve(tmp.transpose()).transpose();
  return PolynomialPiece(box, c);
}

Eigen::VectorXd local_polynomial_1d(const KnotVector& kv, int k, int cell) {
  check_index(kv, k);
  if (cell < 0 || cell >= kv.num_cells()) throw DomainError("cell index out of range");
  const int m = kv.degree();
  const int span = kv.cell_span(cell);
  const double a = kv.cell_lo(cell), b = kv.cell_hi(cell);
  const double len = b - a;
  if (!(len > 0.0)) throw DomainError("degenerate cell");

  Eigen::VectorXd bern = Eigen::VectorXd::Zero(m + 1);
  const int col = k - (span - m);
  if (col < 0 || col > m) return bern;  // b_k vanishes on this cell

  const Eigen::MatrixXd ders = basis_derivatives(kv, span, 0.5 * (a + b), m);
  // Power coefficients in s = (x - a) / len from the Taylor expansion at the midpoint.
  Eigen::VectorXd power = Eigen::VectorXd::Zero(m + 1);
  for (int r = 0; r <= m; ++r) {
    const double tr = ders(r, col) / factorial(r) * std::pow(len, r);
    for (int j = 0; j <= r; ++j) power[j] += tr * binomial(r, j) * std::pow(-0.5, r - j);
  }
  for (int q = 0; q <= m; ++q)
    for (int j = 0; j <= q; ++j) bern[q] += binomial(q, j) / binomial(m, j) * power[j];
  return bern;
}

PolynomialPiece local_polynomial(const TensorGrid& grid, const Index2& k, const Index2& cell) {
  const auto nc = grid.cells();
  if (cell[0] < 0 || cell[0] >= nc[0] || cell[1] < 0 || cell[1] >= nc[1])
    throw DomainError("cell outside the grid");
  std::array<Eigen::VectorXd, 2> factors;
  for (int a = 0; a < 2; ++a) {
    const auto& kv = grid.axis(a);
    const int kc = kv.find_cell(0.5 * (kv.knots()[grid.span(a, cell[a])] +
                                       kv.knots()[grid.span(a, cell[a]) + 1]));
    factors[a] = local_polynomial_1d(kv, k[a], kc);
  }
  return PolynomialPiece(grid.cell_box(cell), factors[0] * factors[1].transpose());
}

std::pair<double, Eigen::VectorXd> deboor_fix_weights(const KnotVector& kv, int k) {
  check_index(kv, k);
  const int m = kv.degree();
  const auto& t = kv.knots();
  // Midpoint of the nonempty span closest to the middle of the support.
  int best = -1;
  double best_off = 0.0;
  for (int l = k; l <= k + m; ++l) {
    if (!(t[l] < t[l + 1])) continue;
    const double off = std::abs(l - (k + 0.5 * m));
    if (best < 0 || off < best_off) {
      best = l;
      best_off = off;
    }
  }
  if (best < 0) throw DomainError("B-spline with empty support");
  const double tau = 0.5 * (t[best] + t[best + 1]);

  // psi(tau + s) = prod_{l=1..m} (t_{k+l} - tau - s), coefficients in s.
  std::vector<double> e{1.0};
  for (int l = 1; l <= m; ++l) {
    const double alpha = t[k + l] - tau;
    std::vector<double> next(e.size() + 1, 0.0);
    for (std::size_t q = 0; q < e.size(); ++q) {
      next[q] += alpha * e[q];
      next[q + 1] -= e[q];
    }
    e = std::move(next);
  }
  Eigen::VectorXd w(m + 1);
  const double mf = factorial(m);
  for (int nu = 0; nu <= m; ++nu) {
    const int q = m - nu;
    const double psi_q = factorial(q) * e[q];
    w[nu] = ((q % 2) ? -1.0 : 1.0) * psi_q / mf;
  }
  return {tau, w};
}

double deboor_fix(const std::array<const KnotVector*, 2>& axes, const Index2& k,
                  const PolynomialPiece& piece) {
  const auto [tau0, w0] = deboor_fix_weights(*axes[0], k[0]);
  const auto [tau1, w1] = deboor_fix_weights(*axes[1], k[1]);
  const Point tau(tau0, tau1);
  const auto deg = piece.degree();
  double sum = 0.0;
  for (int a = 0; a < w0.size(); ++a) {
    if (a > deg[0]) break;
    for (int b = 0; b < w1.size(); ++b) {
      if (b > deg[1]) break;
      sum += w0[a] * w1[b] * piece.derivative(tau, {a, b});
    }
  }
  return sum;
}

double deboor_fix(const TensorGrid& grid, const Index2& k, const PolynomialPiece& piece) {
  return deboor_fix({&grid.axis(0), &grid.axis(1)}, k, piece);
}

}  // namespace webspline
