#include "webspline/assembly.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "cell_loop.hpp"
#include "webspline/errors.hpp"

namespace webspline {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct LocalSystem {
  const std::vector<int>* active = nullptr;
  Eigen::MatrixXd mat;
  Eigen::VectorXd vec;
  double scalar = 0.0;
};

std::string at_point(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << x[0] << ", " << x[1] << ")";
  return os.str();
}

void scatter_matrix(const LocalSystem& loc, Triplets& out) {
  const auto& act = *loc.active;
  const auto n = static_cast<Eigen::Index>(act.size());
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a) out.emplace_back(act[a], act[b], loc.mat(a, b));
}

void scatter_vector(const LocalSystem& loc, Eigen::VectorXd& out) {
  const auto& act = *loc.active;
  for (std::size_t a = 0; a < act.size(); ++a) out[act[a]] += loc.vec[static_cast<Eigen::Index>(a)];
}

SparseMatrix from_triplets(int n, const Triplets& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Calls body(ev, q) for every quadrature point of cell position n after
// resetting the local system to the active size of the cell.
template <class Body>
void per_cell(const WebBasis& basis, const DomainQuadrature& quad, WebBasis::Evaluator& ev, int n,
              LocalSystem& loc, bool matrix, Body&& body) {
  const int cell = quad.cells()[n];
  loc.active = &basis.active(cell);
  const auto na = static_cast<Eigen::Index>(loc.active->size());
  if (matrix)
    loc.mat.setZero(na, na);
  else
    loc.mat.resize(0, 0);
  loc.vec.setZero(na);
  loc.scalar = 0.0;
  for (const auto& q : quad.points(n)) {
    ev.at(cell, q.x);
    body(ev, q);
  }
}

}  // namespace

AssembledSystem assemble_vcpe(const WebBasis& basis, const DomainQuadrature& quad,
                              const ScalarField& a, const ScalarField& f, double reaction) {
  const int ncell = static_cast<int>(quad.cells().size());
  Triplets trip;
  AssembledSystem sys;
  sys.F.setZero(basis.size());
  detail::cell_loop<WebBasis::Evaluator, LocalSystem>(
      ncell, [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, LocalSystem& loc) {
        per_cell(basis, quad, ev, n, loc, true, [&](const WebBasis::Evaluator& e, const QuadPoint& q) {
          const double av = a(q.x);
          if (!(av > 0.0))
            throw DomainError("coefficient a = " + std::to_string(av) + " is not positive at " +
                              at_point(q.x) + "; the problem is not coercive");
          const auto& g = e.gradient();
          loc.mat.noalias() += (q.weight * av) * g * g.transpose();
          if (reaction != 0.0)
            loc.mat.noalias() += (q.weight * reaction) * e.value() * e.value().transpose();
          loc.vec += (q.weight * f(q.x)) * e.value();
        });
      },
      [&](int, const LocalSystem& loc) {
        scatter_matrix(loc, trip);
        scatter_vector(loc, sys.F);
      });
  sys.A = from_triplets(basis.size(), trip);
  return sys;
}

Eigen::VectorXd assemble_load(const WebBasis& basis, const DomainQuadrature& quad,
                              const ScalarField& f) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(basis.size());
  detail::cell_loop<WebBasis::Evaluator, LocalSystem>(
      static_cast<int>(quad.cells().size()), [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, LocalSystem& loc) {
        per_cell(basis, quad, ev, n, loc, false, [&](const WebBasis::Evaluator& e, const QuadPoint& q) {
          loc.vec += (q.weight * f(q.x)) * e.value();
        });
      },
      [&](int, const LocalSystem& loc) { scatter_vector(loc, F); });
  return F;
}

Eigen::VectorXd assemble_dipole_rhs(const WebBasis& basis, const DomainQuadrature& quad,
                                    const VectorField& d) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(basis.size());
  detail::cell_loop<WebBasis::Evaluator, LocalSystem>(
      static_cast<int>(quad.cells().size()), [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, LocalSystem& loc) {
        per_cell(basis, quad, ev, n, loc, false, [&](const WebBasis::Evaluator& e, const QuadPoint& q) {
          loc.vec -= q.weight * (e.gradient() * d(q.x));
        });
      },
      [&](int, const LocalSystem& loc) { scatter_vector(loc, F); });
  return F;
}

SparseMatrix assemble_mass(const WebBasis& basis, const DomainQuadrature& quad) {
  Triplets trip;
  detail::cell_loop<WebBasis::Evaluator, LocalSystem>(
      static_cast<int>(quad.cells().size()), [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, LocalSystem& loc) {
        per_cell(basis, quad, ev, n, loc, true, [&](const WebBasis::Evaluator& e, const QuadPoint& q) {
          loc.mat.noalias() += q.weight * e.value() * e.value().transpose();
        });
      },
      [&](int, const LocalSystem& loc) { scatter_matrix(loc, trip); });
  return from_triplets(basis.size(), trip);
}

PlapSystem assemble_plap(const WebBasis& basis, const DomainQuadrature& quad,
                         const Eigen::VectorXd& coeffs, double p, double eps, const ScalarField& f,
                         bool with_jacobian) {
  if (!(p > 1.0)) throw DomainError("p-Laplacian needs p > 1");
  if (eps < 0.0) throw DomainError("regularization eps must be >= 0");
  if (p < 2.0 && !(eps > 0.0)) throw DomainError("p < 2 needs a positive regularization eps");
  if (coeffs.size() != basis.size()) throw DomainError("coefficient vector has the wrong size");
  Triplets trip;
  PlapSystem sys;
  sys.residual.setZero(basis.size());
  detail::cell_loop<WebBasis::Evaluator, LocalSystem>(
      static_cast<int>(quad.cells().size()), [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, LocalSystem& loc) {
        Eigen::VectorXd cl, gu;
        per_cell(basis, quad, ev, n, loc, with_jacobian,
                 [&](const WebBasis::Evaluator& e, const QuadPoint& q) {
                   const auto& act = e.active();
                   cl.resize(static_cast<Eigen::Index>(act.size()));
                   for (std::size_t a = 0; a < act.size(); ++a) cl[a] = coeffs[act[a]];
                   const double u = cl.dot(e.value());
                   const Eigen::Vector2d g = e.gradient().transpose() * cl;
                   const double s2 = eps * eps + g.squaredNorm();
                   const double mu = std::pow(s2, 0.5 * (p - 2.0));
                   const double fv = f(q.x);
                   if (!std::isfinite(mu) || !std::isfinite(u) || !std::isfinite(fv))
                     throw NumericalError("non-finite p-Laplacian integrand at " + at_point(q.x) +
                                          "; the iterate diverged");
                   gu.noalias() = e.gradient() * g;
                   loc.vec += q.weight * (mu * gu + (u - fv) * e.value());
                   if (with_jacobian) {
                     const auto& gr = e.gradient();
                     loc.mat.noalias() += (q.weight * mu) * gr * gr.transpose();
                     if (p != 2.0) {
                       const double c = (p - 2.0) * std::pow(s2, 0.5 * (p - 4.0));
                       loc.mat.noalias() += (q.weight * c) * gu * gu.transpose();
                     }
                     loc.mat.noalias() += q.weight * e.value() * e.value().transpose();
                   }
                 });
      },
      [&](int, const LocalSystem& loc) {
        if (with_jacobian) scatter_matrix(loc, trip);
        scatter_vector(loc, sys.residual);
      });
  if (with_jacobian) sys.jacobian = from_triplets(basis.size(), trip);
  return sys;
}

double plap_energy(const WebBasis& basis, const DomainQuadrature& quad,
                   const Eigen::VectorXd& coeffs, double p, double eps, const ScalarField& f) {
  if (!(p > 1.0)) throw DomainError("p-Laplacian needs p > 1");
  double total = 0.0;
  detail::cell_loop<WebBasis::Evaluator, LocalSystem>(
      static_cast<int>(quad.cells().size()), [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, LocalSystem& loc) {
        per_cell(basis, quad, ev, n, loc, false, [&](const WebBasis::Evaluator& e, const QuadPoint& q) {
          const auto& act = e.active();
          double u = 0.0;
          Eigen::Vector2d g = Eigen::Vector2d::Zero();
          for (std::size_t a = 0; a < act.size(); ++a) {
            u += coeffs[act[a]] * e.value()[a];
            g += coeffs[act[a]] * e.gradient().row(a).transpose();
          }
          const double s2 = eps * eps + g.squaredNorm();
          loc.scalar += q.weight * (std::pow(s2, 0.5 * p) / p + 0.5 * u * u - f(q.x) * u);
        });
      },
      [&](int, const LocalSystem& loc) { total += loc.scalar; });
  if (!std::isfinite(total)) throw NumericalError("non-finite p-Laplacian energy");
  return total;
}

void write_triplets(std::ostream& os, const SparseMatrix& m) {
  os.precision(17);
  os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace webspline
