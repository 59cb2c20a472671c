#include <gtest/gtest.h>

#include <map>
#include <random>

#include "webspline/webbasis.hpp"

namespace ws = webspline;
using ws::Point;

namespace {

const ws::Box kSquare{Point(-1, -1), Point(1, 1)};

ws::WebBasis disk_basis(int cells, int degree) {
  return ws::WebBasis(ws::TensorGrid::uniform(kSquare, {cells, cells}, degree),
                      ws::ImplicitDomain::disk(Point::Zero(), 1.0));
}

std::vector<Point> disk_samples(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Point x(u(rng), u(rng));
    if (x.squaredNorm() < 0.98) pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST(Extension, SlabLinearExtrapolation) {
  // Degree 1 on knots 0..5 with the strip 1.5 < x < 3.5: the outer hat
  // peaking at x = 1 is extrapolated from the inner hats at 2 and 3 as
  // b_1 = 2 b_2 - b_3 on [2, 3].
  const auto slab = ws::ImplicitDomain::half_plane(Point(1, 0), 1.5) &
                    ws::ImplicitDomain::half_plane(Point(-1, 0), -3.5);
  const ws::TensorGrid grid({std::vector<double>{0, 1, 2, 3, 4, 5}, std::vector<double>{0, 1, 2, 3, 4, 5}},
                            {1, 1});
  const ws::WebBasis basis(grid, slab);
  const auto& idx = basis.index_sets();
  bool seen = false;
  for (std::size_t j = 0; j < idx.outer.size(); ++j) {
    if (idx.outer[j][0] != 1) continue;
    seen = true;
    std::map<int, double> by_x;
    for (const auto& [i, e] : basis.extension().entries[j]) {
      if (idx.inner[i][1] == idx.outer[j][1]) by_x[idx.inner[i][0]] = e;
      else EXPECT_NEAR(e, 0.0, 1e-13);
    }
    EXPECT_NEAR(by_x.at(2), 2.0, 1e-13);
    EXPECT_NEAR(by_x.at(3), -1.0, 1e-13);
  }
  EXPECT_TRUE(seen);
}

TEST(Extension, EntriesBoundedUnderRefinement) {
  for (int cells : {8, 16, 32}) EXPECT_LE(disk_basis(cells, 2).extension().max_abs(), 50.0);
}

TEST(WebBasis, VanishesOnBoundaryAndOutside) {
  const auto basis = disk_basis(8, 2);
  for (int k = 0; k < 40; ++k) {
    const double t = 0.157 * k;
    const Point x(std::cos(t), std::sin(t));
    for (int i = 0; i < basis.size(); ++i) {
      EXPECT_NEAR(basis.eval(i, x), 0.0, 1e-12);
      EXPECT_EQ(basis.eval(i, 1.1 * x), 0.0);
    }
  }
}

TEST(WebBasis, GradientMatchesFiniteDifference) {
  const auto basis = disk_basis(8, 3);
  for (const Point& x : disk_samples(20, 4))
    for (int i = 0; i < basis.size(); i += 7) {
      const double h = 1e-6;
      const double fx = (basis.eval(i, x + Point(h, 0)) - basis.eval(i, x - Point(h, 0))) / (2 * h);
      const double fy = (basis.eval(i, x + Point(0, h)) - basis.eval(i, x - Point(0, h))) / (2 * h);
      EXPECT_NEAR(basis.eval(i, x, {1, 0}), fx, 1e-5);
      EXPECT_NEAR(basis.eval(i, x, {0, 1}), fy, 1e-5);
    }
}

TEST(WebBasis, EvaluatorAgreesWithEval) {
  const auto basis = disk_basis(8, 2);
  ws::WebBasis::Evaluator ev(basis);
  for (const Point& x : disk_samples(30, 6)) {
    const int cell = basis.grid().cell_id(basis.grid().locate(x));
    ev.at(cell, x);
    for (std::size_t a = 0; a < ev.active().size(); ++a) {
      const int i = ev.active()[a];
      EXPECT_NEAR(ev.value()[a], basis.eval(i, x), 1e-13);
      EXPECT_NEAR(ev.gradient()(a, 0), basis.eval(i, x, {1, 0}), 1e-12);
    }
  }
}

TEST(WebBasis, ReproducesWeightedPolynomials) {
  // w q lies in the web space for deg q <= m, so a nodal fit is exact.
  const auto basis = disk_basis(8, 2);
  const auto q = [](const Point& x) { return 1.0 + 0.5 * x[0] - x[1] + x[0] * x[1] - 0.3 * x[1] * x[1]; };
  const auto u = [&](const Point& x) { return ws::weight(basis.domain(), x) * q(x); };
  const Eigen::VectorXd c = ws::project(basis, u);
  for (const Point& x : disk_samples(100, 8)) EXPECT_NEAR(basis.field(c, x), u(x), 1e-8);
}

TEST(Projection, DualToBasis) {
  const auto basis = disk_basis(8, 2);
  EXPECT_NEAR(ws::project(basis, [](const Point&) { return 0.0; }).norm(), 0.0, 0.0);
  for (int i0 : {0, basis.size() / 2, basis.size() - 1}) {
    const Eigen::VectorXd c = ws::project(basis, [&](const Point& x) { return basis.eval(i0, x); });
    for (int i = 0; i < basis.size(); ++i) EXPECT_NEAR(c[i], i == i0 ? 1.0 : 0.0, 1e-9);
  }
}

TEST(Projection, Idempotent) {
  const auto basis = disk_basis(8, 2);
  const auto f = [](const Point& x) { return std::sin(2 * x[0]) * (1 - x.squaredNorm()); };
  const Eigen::VectorXd c = ws::project(basis, f);
  const Eigen::VectorXd c2 = ws::project(basis, [&](const Point& x) { return basis.field(c, x); });
  EXPECT_LE((c - c2).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(Projection, JacksonVanishesOnWebSpace) {
  const auto basis = disk_basis(8, 2);
  const ws::DomainQuadrature quad(basis.domain(), basis.grid(), basis.classification(), {4, 6});
  const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(basis.size(), -1.0, 1.0);
  // Cut-cell quadrature points may sit just outside the disk, where field()
  // returns 0. The evaluator continues the weight, as the projection does.
  ws::WebBasis::Evaluator ev(basis);
  const auto eval = [&](const Point& x, Point& g) {
    ev.at(basis.grid().cell_id(basis.grid().locate(x)), x);
    g = ev.gradient().transpose() * c(Eigen::VectorXi::Map(ev.active().data(), ev.active().size()));
    return ev.value().dot(c(Eigen::VectorXi::Map(ev.active().data(), ev.active().size())));
  };
  const auto u = [&](const Point& x) {
    Point g;
    return eval(x, g);
  };
  const auto gu = [&](const Point& x) {
    Point g;
    eval(x, g);
    return g;
  };
  EXPECT_LE(ws::jackson_error(basis, quad, u, gu), 1e-8);
}

TEST(WebBasis, SummaryCounts) {
  const auto basis = disk_basis(16, 2);
  const auto s = basis.summary();
  EXPECT_EQ(s.inner, basis.size());
  EXPECT_EQ(s.inner + s.outer, s.relevant);
  EXPECT_EQ(s.interior_cells + s.boundary_cells + s.exterior_cells, 256);
  EXPECT_GT(s.min_alpha, 0.0);
}
