#include <gtest/gtest.h>

#include <random>
#include <set>

#include "webspline/errors.hpp"
#include "webspline/geometry.hpp"

namespace ws = webspline;
using ws::Point;

namespace {

const ws::Box kSquare{Point(-1, -1), Point(1, 1)};

// Distance to the boundary of the union of two disks, by dense sampling.
double sampled_distance(const Point& x, const std::vector<std::pair<Point, double>>& disks) {
  double best = 1e300;
  for (const auto& [c, r] : disks)
    for (int k = 0; k < 20000; ++k) {
      const double t = 2.0 * M_PI * k / 20000;
      const Point y = c + r * Point(std::cos(t), std::sin(t));
      // Arcs hidden inside the other disk are not part of the boundary.
      bool on_boundary = true;
      for (const auto& [c2, r2] : disks)
        if ((c2 - c).norm() > 0 && (y - c2).norm() < r2) on_boundary = false;
      if (on_boundary) best = std::min(best, (x - y).norm());
    }
  return best;
}

}  // namespace

TEST(Weight, DiskCenterAndBoundary) {
  const auto disk = ws::ImplicitDomain::disk(Point::Zero(), 1.0);
  EXPECT_DOUBLE_EQ(ws::weight(disk, Point(0, 0)), 0.5);
  for (int k = 0; k < 50; ++k) {
    const double t = 0.37 * k;
    EXPECT_NEAR(ws::weight(disk, Point(std::cos(t), std::sin(t))), 0.0, 1e-15);
  }
  EXPECT_EQ(ws::weight(disk, Point(1.5, 0)), 0.0);
  const auto box = ws::ImplicitDomain::box(Point(0, 0), Point(2, 1));
  EXPECT_NEAR(ws::weight(box, Point(2, 0.5)), 0.0, 1e-15);
  // 2y > 0.5 after normalization is y > 0.25.
  const auto half = ws::ImplicitDomain::half_plane(Point(0, 2), 0.5);
  EXPECT_NEAR(ws::weight(half, Point(3, 0.25)), 0.0, 1e-15);
  EXPECT_NEAR(ws::weight(half, Point(3, 0.5)), 0.25, 1e-15);
}

TEST(Weight, Gradient) {
  const auto disk = ws::ImplicitDomain::disk(Point::Zero(), 1.0);
  EXPECT_NEAR((ws::weight_gradient(disk, Point(0.5, 0)) - Point(-0.5, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(ws::weight_gradient(disk, Point(0, 0)).norm(), 0.0, 1e-15);
  const auto annulus =
      (disk & !ws::ImplicitDomain::disk(Point::Zero(), 0.4)).with_exponent(1.5);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  while (checked < 100) {
    const Point x(u(rng), u(rng));
    if (annulus.level(x) < 1e-3) continue;
    const double h = 1e-6;
    const Point fd((ws::weight(annulus, x + Point(h, 0)) - ws::weight(annulus, x - Point(h, 0))) / (2 * h),
                   (ws::weight(annulus, x + Point(0, h)) - ws::weight(annulus, x - Point(0, h))) / (2 * h));
    EXPECT_NEAR((ws::weight_gradient(annulus, x) - fd).norm(), 0.0, 1e-5);
    ++checked;
  }
  const auto sqrt_disk = disk.with_exponent(0.5);
  EXPECT_THROW(ws::weight_gradient(sqrt_disk, Point(1, 0)), ws::DomainError);
}

TEST(Weight, EquivalentToBoundaryDistance) {
  const std::vector<std::pair<Point, double>> disks = {{Point(-0.3, 0), 0.6}, {Point(0.3, 0), 0.6}};
  const auto lens = ws::ImplicitDomain::disk(disks[0].first, disks[0].second) &
                    ws::ImplicitDomain::disk(disks[1].first, disks[1].second);
  // Deep inside both disks the weight is within a factor 3 of the distance to
  // the boundary of the intersection.
  for (const Point& x : {Point(0, 0), Point(0, 0.1), Point(0.05, -0.1)}) {
    double dist = 1e300;
    for (const auto& [c, r] : disks) dist = std::min(dist, r - (x - c).norm());
    const double w = ws::weight(lens, x);
    EXPECT_GE(w / dist, 1.0 / 3.0);
    EXPECT_LE(w / dist, 3.0);
  }
  // Union of the same disks: boundary distance from dense sampling.
  const auto blob = ws::ImplicitDomain::disk(disks[0].first, disks[0].second) |
                    ws::ImplicitDomain::disk(disks[1].first, disks[1].second);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  double lo = 1e300, hi = 0.0;
  int n = 0;
  while (n < 200) {
    const Point x(u(rng), u(rng));
    if (!blob.inside(x)) continue;
    const double ratio = ws::weight(blob, x) / sampled_distance(x, disks);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++n;
  }
  EXPECT_LE(hi / lo, 10.0);
}

TEST(Domain, DescribeAndCombinators) {
  const auto d = ws::ImplicitDomain::disk(Point::Zero(), 1.0) & !ws::ImplicitDomain::disk(Point::Zero(), 0.4);
  EXPECT_TRUE(d.inside(Point(0.7, 0)));
  EXPECT_FALSE(d.inside(Point(0.1, 0)));
  EXPECT_FALSE(d.inside(Point(1.1, 0)));
  EXPECT_NE(d.describe().find("not("), std::string::npos);
}

TEST(Classification, CornerSignOracle) {
  const auto disk = ws::ImplicitDomain::disk(Point::Zero(), 1.0);
  const auto grid = ws::TensorGrid::uniform(kSquare, {4, 4}, 2);
  const auto cls = ws::classify_cells(disk, grid);
  EXPECT_EQ(cls[(ws::Index2{2, 2})], ws::CellKind::Interior);  // [0, 0.5]^2
  EXPECT_EQ(cls[(ws::Index2{3, 3})], ws::CellKind::Boundary);  // [0.5, 1]^2
  EXPECT_EQ(cls.count(ws::CellKind::Interior) + cls.count(ws::CellKind::Boundary) +
                cls.count(ws::CellKind::Exterior),
            16);
}

TEST(Classification, AlignedBoxHasNoCutCells) {
  const auto box = ws::ImplicitDomain::box(Point(-0.5, -0.5), Point(0.5, 0.5));
  const auto grid = ws::TensorGrid::uniform(kSquare, {8, 8}, 2);
  const auto cls = ws::classify_cells(box, grid);
  EXPECT_EQ(cls.count(ws::CellKind::Interior), 16);
  EXPECT_EQ(cls.count(ws::CellKind::Boundary), 0);
}

TEST(Classification, SoundnessAndRefinementMonotone) {
  const auto disk = ws::ImplicitDomain::disk(Point(0.05, -0.02), 0.9);
  ws::TensorGrid grid = ws::TensorGrid::uniform(kSquare, {6, 6}, 2);
  std::vector<ws::Box> interior;
  for (int level = 0; level < 3; ++level, grid = grid.refined()) {
    const auto cls = ws::classify_cells(disk, grid, 5);
    for (int id = 0; id < grid.num_cells(); ++id) {
      const ws::Box b = grid.cell_box(grid.cell_index(id));
      double lo = 1e300, hi = -1e300;
      for (int a = 0; a < 5; ++a)
        for (int c = 0; c < 5; ++c) {
          const double v = disk.level(b.lo + Point(a / 4.0 * b.size()[0], c / 4.0 * b.size()[1]));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      if (cls.kind[id] == ws::CellKind::Boundary) EXPECT_TRUE(lo < 0.0 && hi > 0.0);
      if (cls.kind[id] == ws::CellKind::Interior) EXPECT_GE(lo, 0.0);
      // Sub-cells of a previously interior cell are never exterior.
      if (cls.kind[id] == ws::CellKind::Exterior)
        for (const auto& p : interior) EXPECT_FALSE(p.contains(b.center()));
    }
    interior.clear();
    for (int id = 0; id < grid.num_cells(); ++id)
      if (cls.kind[id] == ws::CellKind::Interior) interior.push_back(grid.cell_box(grid.cell_index(id)));
  }
}

TEST(IndexSets, WholeBoxHasNoOuterSplines) {
  const auto box = ws::ImplicitDomain::box(Point(-1.5, -1.5), Point(1.5, 1.5));
  const auto grid = ws::TensorGrid::uniform(kSquare, {4, 4}, 2);
  const auto idx = ws::classify_indices(grid, ws::classify_cells(box, grid));
  EXPECT_TRUE(idx.outer.empty());
  EXPECT_EQ(idx.inner.size(), idx.relevant.size());
}

TEST(IndexSets, SlabHandEnumeration) {
  // 1D analogue in x: degree 1, knots 0..5, domain 1.5 < x < 3.5.
  const auto slab = ws::ImplicitDomain::half_plane(Point(1, 0), 1.5) &
                    ws::ImplicitDomain::half_plane(Point(-1, 0), -3.5);
  const ws::TensorGrid grid({std::vector<double>{0, 1, 2, 3, 4, 5}, std::vector<double>{0, 1, 2, 3, 4, 5}},
                            {1, 1});
  const auto idx = ws::classify_indices(grid, ws::classify_cells(slab, grid));
  // Padded knots start at -1, so the hat peaking at x = t has x index t.
  std::set<int> inner_x, outer_x;
  for (const auto& k : idx.inner) inner_x.insert(k[0]);
  for (const auto& k : idx.outer) outer_x.insert(k[0]);
  EXPECT_EQ(inner_x, (std::set<int>{2, 3}));
  EXPECT_EQ(outer_x, (std::set<int>{1, 4}));
}

TEST(IndexSets, PartitionAndCounts) {
  const auto disk = ws::ImplicitDomain::disk(Point::Zero(), 1.0);
  const auto grid = ws::TensorGrid::uniform(kSquare, {32, 32}, 2);
  const auto cls = ws::classify_cells(disk, grid);
  const auto idx = ws::classify_indices(grid, cls);
  EXPECT_EQ(idx.inner.size() + idx.outer.size(), idx.relevant.size());
  for (std::size_t j = 0; j < idx.outer.size(); ++j) {
    EXPECT_EQ(cls[idx.outer_cell[j]], ws::CellKind::Interior);
    EXPECT_EQ(idx.outer_inner[j].size(), 9u);
  }
  for (std::size_t i = 0; i < idx.inner.size(); ++i) {
    EXPECT_EQ(cls[idx.inner_cell[i]], ws::CellKind::Interior);
    EXPECT_TRUE(grid.support_box(idx.inner[i]).contains(idx.inner_center[i]));
  }
}

TEST(IndexSets, TooCoarseGridThrows) {
  const auto disk = ws::ImplicitDomain::disk(Point(0.1, 0.1), 0.2);
  const auto grid = ws::TensorGrid::uniform(kSquare, {2, 2}, 2);
  EXPECT_THROW(ws::classify_indices(grid, ws::classify_cells(disk, grid)), ws::ResolutionError);
}
