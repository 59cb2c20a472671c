#include "webspline/solvers.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "webspline/errors.hpp"

namespace webspline {

CgResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                            double tol, int max_iterations) {
  if (!(tol > 0.0)) throw DomainError("CG tolerance must be positive");
  if (max_iterations < 1) throw DomainError("CG needs at least one iteration");
  if (A.rows() != A.cols() || A.rows() != b.size()) throw DomainError("CG size mismatch");
  if (x.size() != b.size()) x.setZero(b.size());
  CgResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.history.push_back(0.0);
    return res;
  }
  Eigen::VectorXd inv_diag = A.diagonal();
  for (Eigen::Index i = 0; i < inv_diag.size(); ++i) {
    if (!(inv_diag[i] > 0.0)) throw DomainError("CG needs a positive diagonal");
    inv_diag[i] = 1.0 / inv_diag[i];
  }
  Eigen::VectorXd r = b - A * x;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd d = z, ad(b.size());
  double rz = r.dot(z);
  res.history.push_back(r.norm() / bnorm);
  while (res.history.back() > tol) {
    if (res.iterations >= max_iterations) {
      std::ostringstream os;
      os << "CG did not reach relative residual " << tol << " in " << max_iterations
         << " iterations (last " << res.history.back() << ")";
      throw SolverError(os.str(), res.history);
    }
    ad.noalias() = A * d;
    const double alpha = rz / d.dot(ad);
    x += alpha * d;
    r -= alpha * ad;
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
    ++res.iterations;
    res.history.push_back(r.norm() / bnorm);
    if (!std::isfinite(res.history.back())) throw SolverError("CG diverged", res.history);
  }
  return res;
}

LinearSolution solve_vcpe(const WebBasis& basis, const DomainQuadrature& quad, const ScalarField& a,
                          const ScalarField& f, const SolveOptions& opts, double reaction) {
  const AssembledSystem sys = assemble_vcpe(basis, quad, a, f, reaction);
  LinearSolution sol;
  sol.coeffs.setZero(basis.size());
  const CgResult cg =
      conjugate_gradient(sys.A, sys.F, sol.coeffs, opts.linear_tolerance, opts.max_iterations);
  sol.iterations = cg.iterations;
  sol.history = cg.history;
  return sol;
}

namespace {

Eigen::VectorXd spd_solve(const SparseMatrix& J, const Eigen::VectorXd& rhs) {
  Eigen::SimplicialLLT<SparseMatrix> llt(J);
  if (llt.info() != Eigen::Success) throw SolverError("Newton Jacobian is not positive definite");
  Eigen::VectorXd x = llt.solve(rhs);
  if (!x.allFinite()) throw SolverError("Newton step is not finite");
  return x;
}

struct Stage {
  double p;
  double eps;
  bool last;
};

std::vector<Stage> continuation(double p, const SolveOptions& opts) {
  std::vector<double> ps;
  if (p < 1.3 || p > 3.0) {
    const int steps = static_cast<int>(std::ceil(std::abs(p - 2.0) / opts.p_step));
    for (int k = 1; k < steps; ++k) ps.push_back(2.0 + (p - 2.0) * k / steps);
  }
  ps.push_back(p);
  std::vector<Stage> stages;
  for (double pk : ps) {
    if (pk < 2.0) {
      for (double e = opts.eps_start; e > opts.eps_final * 1.0000001; e *= 0.1)
        stages.push_back({pk, e, false});
    }
    stages.push_back({pk, opts.eps_final, false});
  }
  stages.back().last = true;
  return stages;
}

}  // namespace

PlapSolution solve_plap(const WebBasis& basis, const DomainQuadrature& quad, double p,
                        const ScalarField& f, const SolveOptions& opts) {
  if (!(p > 1.0)) throw DomainError("p-Laplacian needs p in (1, inf)");
  PlapSolution sol;
  // p = 2 is linear: one Newton step from zero solves it exactly.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  {
    const PlapSystem sys = assemble_plap(basis, quad, c, 2.0, 0.0, f);
    c = spd_solve(sys.jacobian, -sys.residual);
    sol.history.push_back({2.0, 0.0, sys.residual.norm(), plap_energy(basis, quad, Eigen::VectorXd::Zero(basis.size()), 2.0, 0.0, f), 1.0});
    ++sol.iterations;
  }
  const double tol = opts.nonlinear_tolerance;
  for (const Stage& st : continuation(p, opts)) {
    const double stage_tol = st.last ? tol : std::max(tol, 1e-6);
    std::vector<double> residuals;
    for (int it = 0;; ++it) {
      const PlapSystem sys = assemble_plap(basis, quad, c, st.p, st.eps, f);
      const double r = sys.residual.norm();
      const double energy = plap_energy(basis, quad, c, st.p, st.eps, f);
      residuals.push_back(r);
      if (r <= stage_tol) {
        sol.history.push_back({st.p, st.eps, r, energy, 0.0});
        break;
      }
      if (it >= opts.max_newton) {
        std::ostringstream os;
        os << "Newton did not converge at p = " << st.p << ", eps = " << st.eps
           << " (residual " << r << ")";
        throw SolverError(os.str(), residuals);
      }
      const Eigen::VectorXd d = spd_solve(sys.jacobian, -sys.residual);
      const double slope = sys.residual.dot(d);
      double t = 1.0;
      bool accepted = false;
      Eigen::VectorXd trial;
      for (int k = 0; k <= opts.max_halvings; ++k, t *= 0.5) {
        trial = c + t * d;
        const double e1 = plap_energy(basis, quad, trial, st.p, st.eps, f);
        if (e1 <= energy + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
        // Below roundoff of the energy the Armijo test is meaningless; the
        // full step is taken if it does not raise the energy measurably.
        if (k == 0 && std::abs(slope) < 1e-13 * std::max(1.0, std::abs(energy)) &&
            e1 <= energy + 1e-13 * std::max(1.0, std::abs(energy))) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        std::ostringstream os;
        os << "line search stagnated at p = " << st.p << ", eps = " << st.eps << " (residual "
           << r << ")";
        throw SolverError(os.str(), residuals);
      }
      sol.history.push_back({st.p, st.eps, r, energy, t});
      c = trial;
      ++sol.iterations;
    }
    sol.final_residuals = residuals;
  }
  sol.coeffs = c;
  return sol;
}

StokesSolution solve_quasi_newtonian(const WebBasis& velocity, const PressureSpace& pressure,
                                     const DomainQuadrature& quad, const Viscosity& a_fn,
                                     const VectorField& phi, const SolveOptions& opts) {
  StokesSolution sol;
  const int nv = 2 * velocity.size();
  // More mean-zero pressure modes than velocity unknowns: B^T has a kernel
  // and sparse LU may still return a (meaningless) solution.
  if (pressure.size() - 1 > nv) {
    std::ostringstream os;
    os << "mixed system is singular: " << pressure.size() - 1
       << " mean-zero pressure modes exceed " << nv
       << " velocity unknowns (inf-sup failure). Lower the pressure degree or enlarge the macro "
          "blocks";
    throw SolverError(os.str());
  }
  Eigen::VectorXd prev;  // empty: a(0) on the first sweep
  Eigen::VectorXd x;
  for (int it = 0;; ++it) {
    if (it >= opts.max_picard)
      throw SolverError("Picard iteration did not converge", sol.updates);
    const MixedSystem sys = assemble_mixed(velocity, pressure, quad, a_fn, prev, phi);
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(sys.K);
    lu.factorize(sys.K);
    if (lu.info() != Eigen::Success)
      throw SolverError(
          "mixed system is singular; the pressure space is too rich for the velocity space "
          "(inf-sup failure). Lower the pressure degree or enlarge the macro blocks",
          sol.updates);
    x = lu.solve(sys.rhs);
    const double rel = (sys.K * x - sys.rhs).norm() / std::max(1e-300, sys.rhs.norm());
    if (!x.allFinite() || (sys.rhs.norm() > 0.0 && rel > 1e-6))
      throw SolverError(
          "mixed system is numerically singular; the pressure space is too rich for the "
          "velocity space (inf-sup failure)",
          sol.updates);
    const Eigen::VectorXd v = x.head(nv);
    const double update =
        prev.size() ? (v - prev).norm() / std::max(v.norm(), 1e-300) : (v.norm() > 0 ? 1.0 : 0.0);
    sol.updates.push_back(update);
    prev = v;
    ++sol.iterations;
    if (update <= opts.picard_tolerance) break;
  }
  sol.velocity = x.head(nv);
  sol.pressure = x.segment(nv, pressure.size());
  sol.pressure_mean = pressure.mean_vector().dot(sol.pressure);
  const SparseMatrix B = assemble_divergence(velocity, pressure, quad);
  sol.max_divergence = (B * sol.velocity).cwiseAbs().maxCoeff();
  return sol;
}

double estimate_infsup(const WebBasis& velocity, const PressureSpace& pressure,
                       const DomainQuadrature& quad) {
  if (pressure.size() < 2) throw ConfigurationError("inf-sup needs at least two pressure modes");
  const SparseMatrix G = assemble_velocity_gram(velocity, quad);
  const SparseMatrix B = assemble_divergence(velocity, pressure, quad);
  Eigen::SimplicialLLT<SparseMatrix> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalError("velocity Gram matrix is not positive definite");
  const Eigen::MatrixXd bt = Eigen::MatrixXd(B.transpose());
  const Eigen::MatrixXd x = llt.solve(bt);
  Eigen::MatrixXd s = B * x;
  s = 0.5 * (s + s.transpose()).eval();
  // Orthonormal basis of the mean-zero pressures (the pressure basis is
  // L²-orthonormal, so the pressure Gram matrix is the identity).
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(pressure.mean_vector());
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(pressure.size() - 1);
  const Eigen::MatrixXd sz = z.transpose() * s * z;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sz, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues()[0]));
}

}  // namespace webspline
