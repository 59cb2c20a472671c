#include "webspline/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "webspline/errors.hpp"

namespace webspline {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("Gauss rule needs at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

std::vector<QuadPoint> gauss_rule(const Box& box, int n) {
  std::vector<double> t, w;
  gauss_legendre(n, t, w);
  const Point half = 0.5 * box.size();
  const Point mid = box.center();
  std::vector<QuadPoint> pts;
  pts.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.push_back({Point(mid[0] + half[0] * t[i], mid[1] + half[1] * t[j]),
                     w[i] * w[j] * half[0] * half[1]});
  return pts;
}

namespace {

enum class Sign { Inside, Outside, Cut };

Sign sample_sign(const ImplicitDomain& domain, const Box& box) {
  bool pos = false, neg = false;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Point x(box.lo[0] + 0.5 * i * box.size()[0], box.lo[1] + 0.5 * j * box.size()[1]);
      const double phi = domain.level(x);
      if (phi > 0.0)
        pos = true;
      else if (phi < 0.0)
        neg = true;
      else
        pos = neg = true;
    }
  if (pos && !neg) return Sign::Inside;
  if (neg && !pos) return Sign::Outside;
  return Sign::Cut;
}

// Collapsed Gauss rule on the triangle (a, b, c), exact for polynomials of
// total degree 2n - 2.
void triangle_rule(const Point& a, const Point& b, const Point& c, int n,
                   std::vector<QuadPoint>& out) {
  std::vector<double> t, w;
  gauss_legendre(n, t, w);
  const double area2 = std::abs((b - a)[0] * (c - a)[1] - (b - a)[1] * (c - a)[0]);
  if (area2 == 0.0) return;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = 0.5 * (1.0 + t[i]), r = 0.5 * (1.0 + t[j]);
      // (s, r) on the unit square -> (s, (1 - s) r) on the reference triangle
      const double u = s, v = (1.0 - s) * r;
      out.push_back({a + u * (b - a) + v * (c - a), 0.25 * w[i] * w[j] * (1.0 - s) * area2});
    }
}

// Leaf cut by the boundary: replace the level set by its tangent plane at the
// leaf center, clip the leaf polygon to the positive side, fan-triangulate.
void clipped_rule(const ImplicitDomain& domain, const Box& box, int n, std::vector<QuadPoint>& out) {
  const Point c = box.center();
  const double phi = domain.level(c);
  const Point g = domain.level_gradient(c);
  auto lin = [&](const Point& x) { return phi + g.dot(x - c); };
  const Point corners[4] = {box.lo, Point(box.hi[0], box.lo[1]), box.hi, Point(box.lo[0], box.hi[1])};
  std::vector<Point> poly;
  for (int k = 0; k < 4; ++k) {
    const Point& p = corners[k];
    const Point& q = corners[(k + 1) % 4];
    const double fp = lin(p), fq = lin(q);
    if (fp >= 0.0) poly.push_back(p);
    if ((fp >= 0.0) != (fq >= 0.0)) poly.push_back(p + fp / (fp - fq) * (q - p));
  }
  if (poly.size() < 3) return;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) triangle_rule(poly[0], poly[k], poly[k + 1], n, out);
}

void subdivide(const ImplicitDomain& domain, const Box& box, int level,
               const QuadratureParams& params, std::vector<QuadPoint>& out) {
  const Sign s = level == 0 ? Sign::Cut : sample_sign(domain, box);
  if (s == Sign::Outside) return;
  if (s == Sign::Inside) {
    const auto pts = gauss_rule(box, params.gauss);
    out.insert(out.end(), pts.begin(), pts.end());
    return;
  }
  if (level >= params.depth) {
    if (params.leaf == LeafRule::Linear) {
      clipped_rule(domain, box, params.gauss, out);
    } else if (domain.level(box.center()) > 0.0) {
      const auto pts = gauss_rule(box, params.gauss);
      out.insert(out.end(), pts.begin(), pts.end());
    }
    return;
  }
  const Point mid = box.center();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Box child{Point(i ? mid[0] : box.lo[0], j ? mid[1] : box.lo[1]),
                      Point(i ? box.hi[0] : mid[0], j ? box.hi[1] : mid[1])};
      subdivide(domain, child, level + 1, params, out);
    }
}

}  // namespace

std::vector<QuadPoint> cut_cell_rule(const ImplicitDomain& domain, const Box& box,
                                     const QuadratureParams& params) {
  if (params.depth < 0) throw DomainError("subdivision depth must be >= 0");
  std::vector<QuadPoint> out;
  subdivide(domain, box, 0, params, out);
  return out;
}

DomainQuadrature::DomainQuadrature(const ImplicitDomain& domain, const TensorGrid& grid,
                                   const CellClassification& cls, QuadratureParams params)
    : params_(params) {
  if (params_.gauss < 1) throw DomainError("Gauss order must be >= 1");
  if (params_.depth < 0) throw DomainError("subdivision depth must be >= 0");
  std::vector<int> candidates;
  for (int id = 0; id < grid.num_cells(); ++id)
    if (cls.kind[id] != CellKind::Exterior) candidates.push_back(id);
  std::vector<std::vector<QuadPoint>> rules(candidates.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (int n = 0; n < static_cast<int>(candidates.size()); ++n) {
    const int id = candidates[n];
    const Box box = grid.cell_box(grid.cell_index(id));
    rules[n] = cls.kind[id] == CellKind::Interior ? gauss_rule(box, params_.gauss)
                                                   : cut_cell_rule(domain, box, params_);
  }
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    if (rules[n].empty()) continue;
    cells_.push_back(candidates[n]);
    points_.push_back(std::move(rules[n]));
  }
}

std::size_t DomainQuadrature::total_points() const {
  std::size_t n = 0;
  for (const auto& p : points_) n += p.size();
  return n;
}

double DomainQuadrature::integrate(const std::function<double(const Point&)>& f) const {
  double total = 0.0;
  for (const auto& cell : points_) {
    double sum = 0.0;
    for (const auto& q : cell) {
      const double v = f(q.x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite integrand at (" << q.x[0] << ", " << q.x[1] << ")";
        throw NumericalError(os.str());
      }
      sum += q.weight * v;
    }
    total += sum;
  }
  return total;
}

double integrate(const ImplicitDomain& domain, const TensorGrid& grid,
                 const CellClassification& cls, const QuadratureParams& params,
                 const std::function<double(const Point&)>& f) {
  return DomainQuadrature(domain, grid, cls, params).integrate(f);
}

}  // namespace webspline
