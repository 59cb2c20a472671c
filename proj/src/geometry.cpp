#include "webspline/geometry.hpp"

#include <cmath>
#include <sstream>

#include "webspline/errors.hpp"

namespace webspline {

namespace {

using Node = ImplicitDomain::Node;

struct Value {
  double phi;
  Point grad;
};

Value combine(const Value& a, const Value& b, double sign) {
  const double rho = std::hypot(a.phi, b.phi);
  Value v;
  v.phi = a.phi + b.phi + sign * rho;
  if (rho > 0.0) {
    v.grad = a.grad * (1.0 + sign * a.phi / rho) + b.grad * (1.0 + sign * b.phi / rho);
  } else {
    // joint zero: the R-function is not differentiable; use the symmetric limit
    v.grad = (a.grad + b.grad) * (1.0 + sign * M_SQRT1_2);
  }
  return v;
}

Value slab(double x, double lo, double hi, int axis) {
  const double len = hi - lo;
  Value v;
  v.phi = (x - lo) * (hi - x) / len;
  v.grad = Point::Zero();
  v.grad[axis] = (hi + lo - 2.0 * x) / len;
  return v;
}

Value evaluate(const Node& n, const Point& x) {
  switch (n.kind) {
    case Node::Kind::Disk: {
      const Point d = x - n.p0;
      return {(n.scalar * n.scalar - d.squaredNorm()) / (2.0 * n.scalar), -d / n.scalar};
    }
    case Node::Kind::Box:
      return combine(slab(x[0], n.p0[0], n.p1[0], 0), slab(x[1], n.p0[1], n.p1[1], 1), -1.0);
    case Node::Kind::HalfPlane:
      return {n.p0.dot(x) - n.scalar, n.p0};
    case Node::Kind::And:
      return combine(evaluate(*n.lhs, x), evaluate(*n.rhs, x), -1.0);
    case Node::Kind::Or:
      return combine(evaluate(*n.lhs, x), evaluate(*n.rhs, x), 1.0);
    case Node::Kind::Not: {
      Value v = evaluate(*n.lhs, x);
      return {-v.phi, -v.grad};
    }
  }
  return {0.0, Point::Zero()};
}

double evaluate_level(const Node& n, const Point& x) {
  switch (n.kind) {
    case Node::Kind::Disk:
      return (n.scalar * n.scalar - (x - n.p0).squaredNorm()) / (2.0 * n.scalar);
    case Node::Kind::Box: {
      const double a = (x[0] - n.p0[0]) * (n.p1[0] - x[0]) / (n.p1[0] - n.p0[0]);
      const double b = (x[1] - n.p0[1]) * (n.p1[1] - x[1]) / (n.p1[1] - n.p0[1]);
      return a + b - std::hypot(a, b);
    }
    case Node::Kind::HalfPlane:
      return n.p0.dot(x) - n.scalar;
    case Node::Kind::And: {
      const double a = evaluate_level(*n.lhs, x), b = evaluate_level(*n.rhs, x);
      return a + b - std::hypot(a, b);
    }
    case Node::Kind::Or: {
      const double a = evaluate_level(*n.lhs, x), b = evaluate_level(*n.rhs, x);
      return a + b + std::hypot(a, b);
    }
    case Node::Kind::Not:
      return -evaluate_level(*n.lhs, x);
  }
  return 0.0;
}

void describe_node(const Node& n, std::ostream& os) {
  switch (n.kind) {
    case Node::Kind::Disk:
      os << "disk((" << n.p0[0] << "," << n.p0[1] << ")," << n.scalar << ")";
      break;
    case Node::Kind::Box:
      os << "box((" << n.p0[0] << "," << n.p0[1] << "),(" << n.p1[0] << "," << n.p1[1] << "))";
      break;
    case Node::Kind::HalfPlane:
      os << "half_plane((" << n.p0[0] << "," << n.p0[1] << ")," << n.scalar << ")";
      break;
    case Node::Kind::And:
    case Node::Kind::Or:
      os << (n.kind == Node::Kind::And ? "and(" : "or(");
      describe_node(*n.lhs, os);
      os << ",";
      describe_node(*n.rhs, os);
      os << ")";
      break;
    case Node::Kind::Not:
      os << "not(";
      describe_node(*n.lhs, os);
      os << ")";
      break;
  }
}

}  // namespace

ImplicitDomain ImplicitDomain::disk(const Point& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Disk;
  n->p0 = center;
  n->scalar = radius;
  return ImplicitDomain(n);
}

ImplicitDomain ImplicitDomain::box(const Point& lo, const Point& hi) {
  if (!(hi[0] > lo[0] && hi[1] > lo[1])) throw DomainError("box needs lo < hi");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Box;
  n->p0 = lo;
  n->p1 = hi;
  return ImplicitDomain(n);
}

ImplicitDomain ImplicitDomain::half_plane(const Point& normal, double offset) {
  const double len = normal.norm();
  if (!(len > 0.0)) throw DomainError("half-plane normal must be nonzero");
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::HalfPlane;
  n->p0 = normal / len;
  n->scalar = offset / len;
  return ImplicitDomain(n);
}

ImplicitDomain operator&(const ImplicitDomain& a, const ImplicitDomain& b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::And;
  n->lhs = a.root_;
  n->rhs = b.root_;
  return ImplicitDomain(n, a.exponent_);
}

ImplicitDomain operator|(const ImplicitDomain& a, const ImplicitDomain& b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Or;
  n->lhs = a.root_;
  n->rhs = b.root_;
  return ImplicitDomain(n, a.exponent_);
}

ImplicitDomain operator!(const ImplicitDomain& a) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Not;
  n->lhs = a.root_;
  return ImplicitDomain(n, a.exponent_);
}

ImplicitDomain ImplicitDomain::with_exponent(double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("weight exponent must be >= 0");
  return ImplicitDomain(root_, r);
}

double ImplicitDomain::level(const Point& x) const { return evaluate_level(*root_, x); }

Point ImplicitDomain::level_gradient(const Point& x) const { return evaluate(*root_, x).grad; }

std::string ImplicitDomain::describe() const {
  std::ostringstream os;
  os.precision(17);
  describe_node(*root_, os);
  return os.str();
}

double weight(const ImplicitDomain& domain, const Point& x) {
  const double phi = domain.level(x);
  if (!(phi > 0.0)) return 0.0;
  const double r = domain.exponent();
  return r == 1.0 ? phi : std::pow(phi, r);
}

Point weight_gradient(const ImplicitDomain& domain, const Point& x) {
  const Value v = evaluate(*domain.root(), x);
  const double r = domain.exponent();
  if (!(v.phi > 0.0)) {
    if (r < 1.0) throw DomainError("weight gradient is singular on or outside the boundary");
    return Point::Zero();
  }
  if (r == 1.0) return v.grad;
  return r * std::pow(v.phi, r - 1.0) * v.grad;
}

const char* to_string(CellKind kind) {
  switch (kind) {
    case CellKind::Interior: return "interior";
    case CellKind::Boundary: return "boundary";
    case CellKind::Exterior: return "exterior";
  }
  return "?";
}

int CellClassification::count(CellKind k) const {
  int n = 0;
  for (auto v : kind) n += v == k;
  return n;
}

CellClassification classify_cells(const ImplicitDomain& domain, const TensorGrid& grid,
                                  int samples_per_axis) {
  if (samples_per_axis < 2) throw DomainError("samples_per_axis must be >= 2");
  CellClassification cls;
  cls.cells = grid.cells();
  cls.kind.assign(grid.num_cells(), CellKind::Exterior);
  const int s = samples_per_axis;
#pragma omp parallel for schedule(static)
  for (int id = 0; id < grid.num_cells(); ++id) {
    const Box box = grid.cell_box(grid.cell_index(id));
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < s; ++i) {
      const double x = box.lo[0] + box.size()[0] * i / (s - 1);
      for (int j = 0; j < s; ++j) {
        const double y = box.lo[1] + box.size()[1] * j / (s - 1);
        const double phi = domain.level(Point(x, y));
        lo = std::min(lo, phi);
        hi = std::max(hi, phi);
      }
    }
    CellKind k = CellKind::Boundary;
    if (lo >= 0.0 && hi > 0.0)
      k = CellKind::Interior;
    else if (hi <= 0.0)
      k = CellKind::Exterior;
    cls.kind[id] = k;
  }
  return cls;
}

IndexSets classify_indices(const TensorGrid& grid, const CellClassification& cls) {
  IndexSets idx;
  const auto nb = grid.basis_counts();
  const auto deg = grid.degree();
  idx.lookup.assign(grid.num_basis(), -1);

  std::vector<Index2> interior_cells;
  for (int id = 0; id < grid.num_cells(); ++id)
    if (cls.kind[id] == CellKind::Interior) interior_cells.push_back(grid.cell_index(id));

  for (int k0 = 0; k0 < nb[0]; ++k0) {
    const auto [f0, l0] = grid.support_cells(0, k0);
    for (int k1 = 0; k1 < nb[1]; ++k1) {
      const auto [f1, l1] = grid.support_cells(1, k1);
      bool relevant = false;
      bool has_interior = false;
      Index2 first_interior{-1, -1};
      for (int c0 = f0; c0 < l0; ++c0)
        for (int c1 = f1; c1 < l1; ++c1) {
          const CellKind kind = cls[{c0, c1}];
          if (kind != CellKind::Exterior) relevant = true;
          if (kind == CellKind::Interior && !has_interior) {
            has_interior = true;
            first_interior = {c0, c1};
          }
        }
      if (!relevant) continue;
      const Index2 k{k0, k1};
      idx.relevant.push_back(k);
      const int id = grid.basis_id(k);
      if (has_interior) {
        idx.lookup[id] = static_cast<int>(idx.inner.size());
        idx.inner.push_back(k);
        idx.inner_cell.push_back(first_interior);
        idx.inner_center.push_back(grid.cell_box(first_interior).center());
      } else {
        idx.lookup[id] = -static_cast<int>(idx.outer.size()) - 2;
        idx.outer.push_back(k);
      }
    }
  }
  if (idx.inner.empty())
    throw ResolutionError(
        "no inner B-splines: the grid is too coarse for the domain, refine the grid");

  idx.inner_outer.assign(idx.inner.size(), {});
  idx.outer_cell.resize(idx.outer.size());
  idx.outer_inner.assign(idx.outer.size(), {});
#pragma omp parallel for schedule(dynamic, 16)
  for (int j = 0; j < static_cast<int>(idx.outer.size()); ++j) {
    const Box support = grid.support_box(idx.outer[j]);
    double best = INFINITY;
    Index2 best_cell{-1, -1};
    for (const auto& c : interior_cells) {
      const double d = hausdorff_distance(support, grid.cell_box(c));
      if (d < best) {
        best = d;
        best_cell = c;
      }
    }
    idx.outer_cell[j] = best_cell;
  }
  for (int j = 0; j < static_cast<int>(idx.outer.size()); ++j) {
    const Index2 q = idx.outer_cell[j];
    const int b0 = grid.first_basis(0, q[0]), b1 = grid.first_basis(1, q[1]);
    for (int a = 0; a <= deg[0]; ++a)
      for (int b = 0; b <= deg[1]; ++b) {
        const int i = idx.inner_position(grid.basis_id({b0 + a, b1 + b}));
        if (i < 0) throw ResolutionError("B-spline active on an interior cell is not inner");
        idx.outer_inner[j].push_back(i);
        idx.inner_outer[i].push_back(j);
      }
  }
  return idx;
}

}  // namespace webspline
