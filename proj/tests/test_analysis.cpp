#include <gtest/gtest.h>

#include <random>

#include "webspline/analysis.hpp"
#include "webspline/errors.hpp"

namespace ws = webspline;
using ws::Point;

namespace {

struct Fixture {
  ws::WebBasis basis;
  ws::DomainQuadrature quad;
  explicit Fixture(int cells = 8, int degree = 2)
      : basis(ws::TensorGrid::uniform({Point(-1, -1), Point(1, 1)}, {cells, cells}, degree),
              ws::ImplicitDomain::disk(Point::Zero(), 1.0)),
        quad(basis.domain(), basis.grid(), basis.classification(), {4, 6}) {}
};

double bump(const Point& x) { return 1 - x.squaredNorm(); }
Point bump_grad(const Point& x) { return -2.0 * x; }

std::vector<Point> samples(const ws::ImplicitDomain& d, int n, unsigned seed, double margin) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Point x(u(rng), u(rng));
    if (d.level(x) > margin) pts.push_back(x);
  }
  return pts;
}

// Central-difference divergence of a vector field.
double fd_div(const std::function<Point(const Point&)>& v, const Point& x, double h = 1e-5) {
  return (v(x + Point(h, 0))[0] - v(x - Point(h, 0))[0] + v(x + Point(0, h))[1] - v(x - Point(0, h))[1]) /
         (2 * h);
}

}  // namespace

TEST(Eoc, FormulaAndMedian) {
  EXPECT_NEAR(ws::eoc(0.1, 0.025, 0.2, 0.1), 2.0, 1e-14);
  EXPECT_TRUE(std::isnan(ws::eoc(0.0, 0.1, 0.2, 0.1)));
  EXPECT_DOUBLE_EQ(ws::median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(ws::median({4, 1, 2, 3}), 2.5);
}

TEST(Eoc, ComputedFromLevels) {
  ws::ConvergenceReport r;
  for (int k = 0; k < 4; ++k) {
    ws::LevelRecord rec;
    rec.h = 0.5 / (1 << k);
    rec.errors["h1"] = 3.0 * rec.h * rec.h;
    r.levels.push_back(rec);
  }
  ws::compute_eoc(r);
  ASSERT_EQ(r.eoc.at("h1").size(), 3u);
  for (double v : r.eoc.at("h1")) EXPECT_NEAR(v, 2.0, 1e-12);
}

TEST(ErrorNorm, ZeroApproximation) {
  const Fixture s;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(s.basis.size());
  // ||1 - r^2||_L2 = sqrt(pi/3), |.|_H1^2 = 2 pi.
  EXPECT_NEAR(ws::error_norm(s.basis, s.quad, zero, bump, bump_grad, ws::Norm::L2), std::sqrt(M_PI / 3), 1e-6);
  // |grad u| does not vanish on the circle, so the leaf clipping error shows.
  EXPECT_NEAR(ws::error_norm(s.basis, s.quad, zero, bump, bump_grad, ws::Norm::H1),
              std::sqrt(M_PI / 3 + 2 * M_PI), 1e-5);
  EXPECT_THROW(ws::error_norm(s.basis, s.quad, zero, bump, bump_grad, ws::Norm::W1p, 1.0), ws::DomainError);
}

TEST(ErrorNorm, ExactCoefficientsGiveZero) {
  // 1 - r^2 = 2w lies in the web space for degree >= 1.
  const Fixture s;
  const Eigen::VectorXd c = ws::project(s.basis, bump);
  const auto e = ws::scalar_errors(s.basis, s.quad, c, bump, bump_grad, 1.5);
  EXPECT_LE(e.l2, 1e-9);
  EXPECT_LE(e.h1, 1e-9);
  EXPECT_LE(e.quasi, 1e-9);
}

TEST(ErrorNorm, QuasiNormBoundsAndTriangle) {
  const Fixture s;
  const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(s.basis.size(), -0.3, 0.5);
  const auto u = [](const Point& x) { return std::cos(x[0]) * (1 - x.squaredNorm()); };
  const auto gu = [](const Point& x) {
    return Point(-std::sin(x[0]) * (1 - x.squaredNorm()) - 2 * x[0] * std::cos(x[0]), -2 * x[1] * std::cos(x[0]));
  };
  for (double p : {1.25, 1.5, 2.0}) {
    const auto e = ws::scalar_errors(s.basis, s.quad, c, u, gu, p);
    EXPECT_LE(e.quasi * e.quasi, std::pow(e.w1p, p) * (1 + 1e-12));
  }
  const auto e2 = ws::scalar_errors(s.basis, s.quad, c, u, gu, 2.0);
  EXPECT_NEAR(e2.w1p, e2.h1, 1e-12);
  // Triangle inequality in H1 through the zero function.
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(s.basis.size());
  const double a = ws::error_norm(s.basis, s.quad, c, u, gu, ws::Norm::H1);
  const double b = ws::error_norm(s.basis, s.quad, zero, u, gu, ws::Norm::H1);
  const double uh = ws::error_norm(s.basis, s.quad, c, [](const Point&) { return 0.0; },
                                   [](const Point&) { return Point(0, 0); }, ws::Norm::H1);
  EXPECT_LE(a, b + uh + 1e-12);
}

TEST(Cases, ExactSolutionsVanishOnBoundary) {
  for (const auto& name : ws::case_names()) {
    const auto c = ws::manufactured_case(name);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    int n = 0;
    while (n < 500) {
      // Project random points onto the zero set by bisection along the ray
      // from a known interior point.
      const Point dir = Point(u(rng), u(rng)).normalized();
      const Point start = c.domain.inside(Point(0, 0)) ? Point(0, 0) : Point(0.7, 0);
      double lo = 0, hi = 2;
      if (c.domain.inside(start + hi * dir)) continue;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (c.domain.inside(start + mid * dir) ? lo : hi) = mid;
      }
      const Point x = start + lo * dir;
      if (c.u) EXPECT_NEAR(c.u(x), 0.0, 1e-9) << name;
      if (c.velocity) EXPECT_NEAR(c.velocity(x).norm(), 0.0, 1e-9) << name;
      ++n;
    }
  }
}

TEST(Cases, SourceMatchesOperator) {
  for (const auto& name : ws::case_names()) {
    const auto c = ws::manufactured_case(name, {2, 1.5});
    if (c.kind == ws::ProblemKind::QuasiNewtonian) continue;
    const double margin = name == "plap_radial" ? 0.1 : 0.02;
    for (const Point& x : samples(c.domain, 100, 3, margin)) {
      if (name == "plap_radial" && x.norm() < 0.1) continue;
      double f;
      if (c.kind == ws::ProblemKind::Vcpe) {
        f = -fd_div([&](const Point& y) { return Point(c.a(y) * c.grad_u(y)); }, x);
      } else {
        f = -fd_div([&](const Point& y) {
          const Point g = c.grad_u(y);
          return Point(std::pow(g.norm(), c.p - 2) * g);
        }, x) + c.u(x);
      }
      EXPECT_NEAR(f, c.f(x), 1e-6 * std::max(1.0, std::abs(f))) << name << " at " << x.transpose();
    }
  }
}

TEST(Cases, BodyForceMatchesOperator) {
  const auto c = ws::manufactured_case("stokes_carreau");
  for (const Point& x : samples(c.domain, 100, 5, 0.02)) {
    const auto stress_row = [&](int i) {
      return [&, i](const Point& y) {
        const Eigen::Matrix2d g = c.velocity_grad(y);
        const Eigen::Matrix2d d = 0.5 * (g + g.transpose());
        return Point(c.viscosity((d.array() * d.array()).sum()) * d.row(i).transpose());
      };
    };
    const double h = 1e-5;
    const Point grad_p((c.pressure(x + Point(h, 0)) - c.pressure(x - Point(h, 0))) / (2 * h),
                       (c.pressure(x + Point(0, h)) - c.pressure(x - Point(0, h))) / (2 * h));
    const Point phi(-fd_div(stress_row(0), x) + grad_p[0], -fd_div(stress_row(1), x) + grad_p[1]);
    EXPECT_LE((phi - c.phi(x)).norm(), 1e-6 * std::max(1.0, phi.norm()));
  }
}

TEST(Cases, UnknownAndInadmissible) {
  EXPECT_THROW(ws::manufactured_case("nope"), ws::ConfigurationError);
  EXPECT_THROW(ws::manufactured_case("plap_smooth", {2, 1.0}), ws::ConfigurationError);
}

TEST(Convergence, NeedsThreeLevels) {
  ws::StudySettings st;
  st.levels = 2;
  EXPECT_THROW(ws::run_convergence(ws::manufactured_case("disk_poisson"), st), ws::ConfigurationError);
}

TEST(Convergence, SmallPoissonStudy) {
  ws::StudySettings st;
  st.grid.cells = {4, 4};
  st.quadrature = {3, 5};
  st.levels = 3;
  const auto r = ws::run_convergence(ws::manufactured_case("disk_poisson"), st);
  ASSERT_TRUE(r.failure.empty()) << r.failure;
  ASSERT_EQ(r.levels.size(), 3u);
  EXPECT_LT(r.levels[2].errors.at("h1"), r.levels[0].errors.at("h1"));
  EXPECT_EQ(r.eoc.at("h1").size(), 2u);
}
