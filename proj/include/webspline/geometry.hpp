#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "webspline/splines.hpp"

namespace webspline {

/// Implicit description of a (possibly multiply connected) planar domain.
///
/// The level function phi is built from primitives combined by the R_0
/// system of R-functions:
///   conjunction  a & b = a + b - sqrt(a^2 + b^2)
///   disjunction  a | b = a + b + sqrt(a^2 + b^2)
///   complement   !a    = -a
/// phi > 0 inside, phi = 0 on the boundary, phi < 0 outside. The weight is
/// w = phi^r on the domain and 0 elsewhere.
class ImplicitDomain {
 public:
  struct Node;

  static ImplicitDomain disk(const Point& center, double radius);
  static ImplicitDomain box(const Point& lo, const Point& hi);
  // {x : normal . x > offset}; the normal is normalized.
  static ImplicitDomain half_plane(const Point& normal, double offset);

  friend ImplicitDomain operator&(const ImplicitDomain& a, const ImplicitDomain& b);
  friend ImplicitDomain operator|(const ImplicitDomain& a, const ImplicitDomain& b);
  friend ImplicitDomain operator!(const ImplicitDomain& a);

  ImplicitDomain with_exponent(double r) const;
  double exponent() const noexcept { return exponent_; }

  double level(const Point& x) const;
  Point level_gradient(const Point& x) const;
  bool inside(const Point& x) const { return level(x) > 0.0; }

  // Human-readable expression, e.g. "and(disk(...), not(disk(...)))".
  std::string describe() const;

  const std::shared_ptr<const Node>& root() const noexcept { return root_; }

 private:
  explicit ImplicitDomain(std::shared_ptr<const Node> root, double r = 1.0)
      : root_(std::move(root)), exponent_(r) {}

  std::shared_ptr<const Node> root_;
  double exponent_ = 1.0;
};

struct ImplicitDomain::Node {
  enum class Kind { Disk, Box, HalfPlane, And, Or, Not };
  Kind kind;
  Point p0 = Point::Zero();  // center / lo / normal
  Point p1 = Point::Zero();  // hi
  double scalar = 0.0;       // radius / offset
  std::shared_ptr<const Node> lhs, rhs;
};

/// w(x) = phi(x)^r for phi(x) > 0, else 0.
double weight(const ImplicitDomain& domain, const Point& x);

/// Gradient of w. Throws DomainError where it is singular (phi <= 0 and r < 1).
Point weight_gradient(const ImplicitDomain& domain, const Point& x);

enum class CellKind : std::uint8_t { Interior, Boundary, Exterior };

const char* to_string(CellKind kind);

/// Per-cell label for every cell of a TensorGrid.
struct CellClassification {
  std::array<int, 2> cells{0, 0};
  std::vector<CellKind> kind;  // indexed by TensorGrid::cell_id

  CellKind operator[](const Index2& c) const { return kind[c[0] * cells[1] + c[1]]; }
  int count(CellKind k) const;
};

/// Labels cells from the sign of phi on a samples_per_axis^2 lattice that
/// includes the corners. A cell is Interior when it lies in the closure of
/// the domain (all samples >= 0, some > 0), Exterior when it misses the open
/// domain (all samples <= 0), and Boundary otherwise.
CellClassification classify_cells(const ImplicitDomain& domain, const TensorGrid& grid,
                                  int samples_per_axis = 5);

/// Relevant (K), inner (I) and outer (J) B-spline index sets together with
/// the data needed for the extension: Q_j, I(j), J(i) and x_i.
struct IndexSets {
  std::vector<Index2> relevant;  // K, lexicographic
  std::vector<Index2> inner;     // I, lexicographic; position = web-basis number
  std::vector<Index2> outer;     // J, lexicographic

  std::vector<Index2> outer_cell;               // Q_j, per outer position
  std::vector<std::vector<int>> outer_inner;    // I(j) as inner positions
  std::vector<std::vector<int>> inner_outer;    // J(i) as outer positions
  std::vector<Index2> inner_cell;               // interior cell holding x_i
  std::vector<Point> inner_center;              // x_i

  // Per tensor basis id: inner position (>= 0), -(outer position) - 2 for
  // outer indices, and -1 for irrelevant ones.
  std::vector<int> lookup;

  int inner_position(int basis_id) const { return lookup[basis_id] >= 0 ? lookup[basis_id] : -1; }
  int outer_position(int basis_id) const {
    return lookup[basis_id] <= -2 ? -lookup[basis_id] - 2 : -1;
  }
};

IndexSets classify_indices(const TensorGrid& grid, const CellClassification& cls);

}  // namespace webspline
