#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "webspline/errors.hpp"
#include "webspline/splines.hpp"

namespace ws = webspline;
using ws::Point;

TEST(BSpline, HatPeak) {
  const ws::KnotVector kv({0, 1, 2}, 1);
  EXPECT_DOUBLE_EQ(ws::eval_bspline(kv, 0, 1.0), 1.0);
}

TEST(BSpline, QuadraticHandUnrolled) {
  // b = x^2/2 on [0,1), (-2x^2 + 6x - 3)/2 on [1,2): 0.75 at x = 1.5.
  const ws::KnotVector kv({0, 1, 2, 3}, 2);
  EXPECT_NEAR(ws::eval_bspline(kv, 0, 1.5), 0.75, 1e-15);
  EXPECT_EQ(ws::eval_bspline(kv, 0, 3.5), 0.0);
}

TEST(BSpline, InvalidIndexThrows) {
  const ws::KnotVector kv({0, 1, 2, 3}, 2);
  EXPECT_THROW(ws::eval_bspline(kv, 1, 0.5), ws::DomainError);
  EXPECT_THROW(ws::eval_bspline_deriv(kv, 0, 0.5, -1), ws::DomainError);
}

TEST(BSpline, KnotVectorValidation) {
  EXPECT_THROW(ws::KnotVector({0, 2, 1, 3}, 1), ws::DomainError);
  EXPECT_THROW(ws::KnotVector({0, 1}, 1), ws::DomainError);
  EXPECT_THROW(ws::KnotVector({0, 0, 0, 1, 2}, 1), ws::DomainError);
}

TEST(BSpline, DerivativeExamples) {
  const ws::KnotVector hat({0, 1, 2}, 1);
  EXPECT_DOUBLE_EQ(ws::eval_bspline_deriv(hat, 0, 0.5, 1), 1.0);
  const ws::KnotVector quad({0, 1, 2, 3}, 2);
  EXPECT_NEAR(ws::eval_bspline_deriv(quad, 0, 1.5, 1), 0.0, 1e-14);
}

TEST(BSpline, DerivativeMatchesFiniteDifference) {
  std::mt19937 rng(3);
  for (int m = 1; m <= 3; ++m) {
    const ws::KnotVector kv = test::random_knots(rng, m, 8);
    std::uniform_real_distribution<double> pick(kv.knots().front(), kv.knots().back());
    for (int s = 0; s < 100; ++s) {
      const double x = pick(rng);
      for (int k = 0; k < kv.num_basis(); ++k) {
        const double fd = (ws::eval_bspline(kv, k, x + 1e-6) - ws::eval_bspline(kv, k, x - 1e-6)) / 2e-6;
        // Skip samples straddling a knot.
        bool near_knot = false;
        for (double t : kv.knots()) near_knot |= std::abs(t - x) < 2e-6;
        if (!near_knot) EXPECT_NEAR(ws::eval_bspline_deriv(kv, k, x, 1), fd, 1e-5);
      }
    }
  }
}

TEST(BSpline, PartitionNonnegativityLocality) {
  std::mt19937 rng(5);
  for (int m = 1; m <= 3; ++m) {
    const ws::KnotVector kv = test::random_knots(rng, m, 10);
    const auto& t = kv.knots();
    std::uniform_real_distribution<double> inner(t[m], t[t.size() - 1 - m]);
    for (int s = 0; s < 1000; ++s) {
      const double x = inner(rng);
      double sum = 0.0;
      for (int k = 0; k < kv.num_basis(); ++k) {
        const double v = ws::eval_bspline(kv, k, x);
        EXPECT_GE(v, 0.0);
        if (x < t[k] || x > t[k + m + 1]) EXPECT_EQ(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(BSpline, BasisDerivativesMatchScalar) {
  const ws::KnotVector kv({0, 0.5, 1.2, 2, 3.1, 4, 4.4, 5.5}, 3);
  const int span = 3;  // [2, 3.1)
  const Eigen::MatrixXd d = ws::basis_derivatives(kv, span, 2.5, 2);
  for (int r = 0; r <= 3; ++r)
    for (int order = 0; order <= 2; ++order)
      EXPECT_NEAR(d(order, r), ws::eval_bspline_deriv(kv, span - 3 + r, 2.5, order), 1e-12);
}

TEST(TensorGrid, HatPeakAndPartition) {
  const auto grid = ws::TensorGrid::uniform({Point(0, 0), Point(4, 4)}, {4, 4}, 1);
  // Padded knots start at -1, so the hat centred at (2, 2) is index (2, 2).
  EXPECT_NEAR(ws::eval_tensor_bspline(grid, {2, 2}, Point(2, 2)), 1.0, 1e-15);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  const auto g2 = ws::TensorGrid::graded({Point(0, 0), Point(4, 4)}, {5, 6}, 2, 1.3, true);
  for (int s = 0; s < 200; ++s) {
    const Point x(u(rng), u(rng));
    double sum = 0.0;
    for (int a = 0; a < g2.basis_counts()[0]; ++a)
      for (int b = 0; b < g2.basis_counts()[1]; ++b) sum += ws::eval_tensor_bspline(g2, {a, b}, x);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(TensorGrid, PartialDerivativeMatchesFiniteDifference) {
  const auto grid = ws::TensorGrid::graded({Point(-1, -1), Point(1, 1)}, {6, 6}, 3, 1.2, false);
  const Point x(0.123, -0.321);
  for (int k = 0; k < grid.num_basis(); ++k) {
    const auto ki = grid.basis_index(k);
    const double fd = (ws::eval_tensor_bspline(grid, ki, x + Point(1e-6, 0)) -
                       ws::eval_tensor_bspline(grid, ki, x - Point(1e-6, 0))) /
                      2e-6;
    EXPECT_NEAR(ws::eval_tensor_bspline(grid, ki, x, {1, 0}), fd, 1e-5);
  }
}

TEST(TensorGrid, MeshsizeAndRefinement) {
  const auto grid = ws::TensorGrid::uniform({Point(-1, -1), Point(1, 1)}, {8, 8}, 2);
  EXPECT_NEAR(grid.meshsize(), std::sqrt(2.0) / 4.0, 1e-15);
  const auto fine = grid.refined();
  EXPECT_EQ(fine.cells()[0], 16);
  EXPECT_NEAR(fine.meshsize(), grid.meshsize() / 2.0, 1e-15);
  const auto graded = ws::TensorGrid::graded({Point(0, 0), Point(1, 1)}, {5, 5}, 2, 1.15, true);
  const auto& b = graded.breakpoints(0);
  EXPECT_NEAR((b[5] - b[4]) / (b[1] - b[0]), std::pow(1.15, 4), 1e-12);
}

TEST(PolynomialPiece, HatLimbAndAgreement) {
  const ws::KnotVector hat({0, 1, 2}, 1);
  const Eigen::VectorXd c = ws::local_polynomial_1d(hat, 0, 0);
  // Bernstein coefficients of x on [0, 1].
  EXPECT_NEAR(c[0], 0.0, 1e-15);
  EXPECT_NEAR(c[1], 1.0, 1e-15);

  const auto grid = ws::TensorGrid::graded({Point(0, 0), Point(2, 3)}, {4, 5}, 2, 1.2, true);
  const ws::Index2 k{2, 3}, cell{1, 2};
  const ws::PolynomialPiece piece = ws::local_polynomial(grid, k, cell);
  const ws::Box box = grid.cell_box(cell);
  EXPECT_NEAR(piece(box.center()), ws::eval_tensor_bspline(grid, k, box.center()), 1e-12);
  // Outside the cell the piece is the polynomial extension: compare with the
  // interpolant through (m+1)^2 samples inside the cell.
  const ws::PolynomialPiece interp = ws::PolynomialPiece::interpolate(
      box, {2, 2}, [&](const Point& x) { return ws::eval_tensor_bspline(grid, k, x); });
  const Point outside = box.hi + Point(0.4, 0.7);
  EXPECT_NEAR(piece(outside), interp(outside), 1e-10);
}

TEST(DeBoorFix, BiorthogonalRandomKnots) {
  std::mt19937 rng(11);
  for (int m = 1; m <= 3; ++m)
    for (int trial = 0; trial < 5; ++trial)
      EXPECT_LE(test::biorthogonality_defect(test::random_knots(rng, m, 7), test::random_knots(rng, m, 6)),
                1e-10);
}

TEST(DeBoorFix, ReproducesOne) {
  const auto grid = ws::TensorGrid::graded({Point(0, 0), Point(1, 1)}, {5, 5}, 3, 1.3, false);
  const ws::Box box = grid.cell_box({2, 2});
  const ws::PolynomialPiece one = ws::PolynomialPiece::interpolate(box, {3, 3}, [](const Point&) { return 1.0; });
  const Point x(0.41, 0.57);
  double sum = 0.0;
  for (int k = 0; k < grid.num_basis(); ++k) {
    const auto ki = grid.basis_index(k);
    sum += ws::deboor_fix(grid, ki, one) * ws::eval_tensor_bspline(grid, ki, x);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}
