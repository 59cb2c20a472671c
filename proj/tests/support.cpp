#include "support.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ws = webspline;

namespace test {

ws::KnotVector random_knots(std::mt19937& rng, int degree, int cells) {
  std::uniform_real_distribution<double> gap(0.2, 1.0);
  std::vector<double> t{0.0};
  for (int i = 0; i < cells + 2 * degree; ++i) t.push_back(t.back() + gap(rng));
  return ws::KnotVector(t, degree);
}

double biorthogonality_defect(const ws::KnotVector& kx, const ws::KnotVector& ky) {
  const int m0 = kx.degree(), m1 = ky.degree();
  double worst = 0.0;
  for (int k0 = 0; k0 < kx.num_basis(); ++k0)
    for (int k1 = 0; k1 < ky.num_basis(); ++k1) {
      const double t0 = ws::deboor_fix_weights(kx, k0).first;
      const double t1 = ws::deboor_fix_weights(ky, k1).first;
      const int c0 = kx.find_cell(t0), c1 = ky.find_cell(t1);
      const int s0 = kx.cell_span(c0), s1 = ky.cell_span(c1);
      // Spans near the ends of an unclamped vector carry fewer than m + 1 splines.
      if (s0 < m0 || s1 < m1 || s0 >= kx.num_basis() || s1 >= ky.num_basis()) continue;
      const ws::Box box{ws::Point(kx.cell_lo(c0), ky.cell_lo(c1)),
                        ws::Point(kx.cell_hi(c0), ky.cell_hi(c1))};
      for (int j0 = s0 - m0; j0 <= s0; ++j0)
        for (int j1 = s1 - m1; j1 <= s1; ++j1) {
          if (j0 < 0 || j1 < 0 || j0 >= kx.num_basis() || j1 >= ky.num_basis()) continue;
          const Eigen::VectorXd bx = ws::local_polynomial_1d(kx, j0, c0);
          const Eigen::VectorXd by = ws::local_polynomial_1d(ky, j1, c1);
          const ws::PolynomialPiece piece(box, bx * by.transpose());
          const double v = ws::deboor_fix({&kx, &ky}, {k0, k1}, piece);
          const double expect = (j0 == k0 && j1 == k1) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(v - expect));
        }
    }
  return worst;
}

ws::SparseMatrix web_gram(const ws::WebBasis& basis, const ws::DomainQuadrature& quad) {
  return ws::assemble_vcpe(
             basis, quad, [](const ws::Point&) { return 1.0; },
             [](const ws::Point&) { return 0.0; }, 1.0)
      .A;
}

Eigen::MatrixXd raw_gram(const ws::WebBasis& basis, const ws::DomainQuadrature& quad) {
  const ws::TensorGrid& grid = basis.grid();
  const auto& relevant = basis.index_sets().relevant;
  std::vector<int> pos(grid.num_basis(), -1);
  for (std::size_t k = 0; k < relevant.size(); ++k) pos[grid.basis_id(relevant[k])] = static_cast<int>(k);
  const int n = static_cast<int>(relevant.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  const auto [m0, m1] = grid.degree();
  Eigen::MatrixXd d0, d1;
  std::vector<int> ids;
  Eigen::VectorXd v;
  Eigen::MatrixXd gr;
  for (std::size_t c = 0; c < quad.cells().size(); ++c) {
    const ws::Index2 cell = grid.cell_index(quad.cells()[c]);
    const int f0 = grid.first_basis(0, cell[0]), f1 = grid.first_basis(1, cell[1]);
    ids.clear();
    for (int a = 0; a <= m0; ++a)
      for (int b = 0; b <= m1; ++b) ids.push_back(pos[grid.basis_id({f0 + a, f1 + b})]);
    v.resize(ids.size());
    gr.resize(ids.size(), 2);
    for (const auto& q : quad.points(c)) {
      ws::basis_derivatives(grid.axis(0), grid.span(0, cell[0]), q.x[0], 1, d0);
      ws::basis_derivatives(grid.axis(1), grid.span(1, cell[1]), q.x[1], 1, d1);
      // w = phi (r = 1), continued across the boundary like the web-splines.
      const double w = basis.domain().level(q.x);
      const ws::Point gw = basis.domain().level_gradient(q.x);
      int r = 0;
      for (int a = 0; a <= m0; ++a)
        for (int b = 0; b <= m1; ++b, ++r) {
          const double bv = d0(0, a) * d1(0, b);
          v[r] = w * bv;
          gr(r, 0) = gw[0] * bv + w * d0(1, a) * d1(0, b);
          gr(r, 1) = gw[1] * bv + w * d0(0, a) * d1(1, b);
        }
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < ids.size(); ++j)
          g(ids[i], ids[j]) += q.weight * (v[i] * v[j] + gr.row(i).dot(gr.row(j)));
    }
  }
  return g;
}

double condition(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const auto& e = eig.eigenvalues();
  return e[e.size() - 1] / e[0];
}

double jacobian_defect(const ws::WebBasis& basis, const ws::DomainQuadrature& quad, double p,
                       double eps, const ws::ScalarField& f, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd c(basis.size()), d(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    c[i] = normal(rng);
    d[i] = normal(rng);
  }
  const ws::PlapSystem sys = ws::assemble_plap(basis, quad, c, p, eps, f);
  const Eigen::VectorXd jd = sys.jacobian * d;
  const double t = 1e-6;
  const Eigen::VectorXd rp = ws::assemble_plap(basis, quad, c + t * d, p, eps, f, false).residual;
  const Eigen::VectorXd rm = ws::assemble_plap(basis, quad, c - t * d, p, eps, f, false).residual;
  return (jd - (rp - rm) / (2.0 * t)).norm() / jd.norm();
}

}  // namespace test
