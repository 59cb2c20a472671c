#include "webspline/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cell_loop.hpp"
#include "webspline/errors.hpp"

namespace webspline {

namespace {

struct Sums {
  double l2 = 0.0, h1 = 0.0, w1p = 0.0, quasi = 0.0;
};

Sums error_sums(const WebBasis& basis, const DomainQuadrature& quad, const Eigen::VectorXd& coeffs,
                const ScalarField& u, const VectorField& grad_u, double p) {
  Sums total;
  detail::cell_loop<WebBasis::Evaluator, Sums>(
      static_cast<int>(quad.cells().size()), [&] { return WebBasis::Evaluator(basis); },
      [&](WebBasis::Evaluator& ev, int n, Sums& s) {
        s = Sums{};
        const int cell = quad.cells()[n];
        for (const auto& q : quad.points(n)) {
          ev.at(cell, q.x);
          const auto& act = ev.active();
          double uh = 0.0;
          Eigen::Vector2d gh = Eigen::Vector2d::Zero();
          for (std::size_t a = 0; a < act.size(); ++a) {
            uh += coeffs[act[a]] * ev.value()[a];
            gh += coeffs[act[a]] * ev.gradient().row(a).transpose();
          }
          const Eigen::Vector2d gu = grad_u(q.x);
          const double e = u(q.x) - uh;
          const double ge = (gu - gh).norm();
          s.l2 += q.weight * e * e;
          s.h1 += q.weight * (e * e + ge * ge);
          s.w1p += q.weight * (std::pow(std::abs(e), p) + std::pow(ge, p));
          const double base = gu.norm() + ge;
          if (base > 0.0) s.quasi += q.weight * std::pow(base, p - 2.0) * ge * ge;
        }
      },
      [&](int, const Sums& s) {
        total.l2 += s.l2;
        total.h1 += s.h1;
        total.w1p += s.w1p;
        total.quasi += s.quasi;
      });
  return total;
}

}  // namespace

ScalarErrors scalar_errors(const WebBasis& basis, const DomainQuadrature& quad,
                           const Eigen::VectorXd& coeffs, const ScalarField& u,
                           const VectorField& grad_u, double p) {
  if (!(p > 1.0)) throw DomainError("norm exponent p must exceed 1");
  const Sums s = error_sums(basis, quad, coeffs, u, grad_u, p);
  return {std::sqrt(s.l2), std::sqrt(s.h1), std::pow(s.w1p, 1.0 / p), std::sqrt(s.quasi)};
}

double error_norm(const WebBasis& basis, const DomainQuadrature& quad, const Eigen::VectorXd& coeffs,
                  const ScalarField& u, const VectorField& grad_u, Norm norm, double p) {
  const ScalarErrors e = scalar_errors(basis, quad, coeffs, u, grad_u, p);
  switch (norm) {
    case Norm::L2: return e.l2;
    case Norm::H1: return e.h1;
    case Norm::W1p: return e.w1p;
    case Norm::Quasi: return e.quasi;
  }
  return e.h1;
}

FlowErrors flow_errors(const WebBasis& velocity, const PressureSpace& pressure,
                       const DomainQuadrature& quad, const Eigen::VectorXd& velocity_coeffs,
                       const Eigen::VectorXd& pressure_coeffs, const ManufacturedCase& c) {
  const int nv = velocity.size();
  struct FlowSums {
    double l2 = 0.0, h1 = 0.0, p = 0.0;
  };
  struct State {
    WebBasis::Evaluator ev;
    Eigen::VectorXd psi;
  };
  FlowSums total;
  const int nl = pressure.local_size();
  detail::cell_loop<State, FlowSums>(
      static_cast<int>(quad.cells().size()), [&] { return State{WebBasis::Evaluator(velocity), {}}; },
      [&](State& st, int n, FlowSums& s) {
        s = FlowSums{};
        const int cell = quad.cells()[n];
        const int e = pressure.element_of_cell(cell);
        for (const auto& q : quad.points(n)) {
          st.ev.at(cell, q.x);
          const auto& act = st.ev.active();
          Eigen::Vector2d uh = Eigen::Vector2d::Zero();
          Eigen::Matrix2d gh = Eigen::Matrix2d::Zero();
          for (std::size_t a = 0; a < act.size(); ++a) {
            const double c1 = velocity_coeffs[act[a]], c2 = velocity_coeffs[nv + act[a]];
            uh[0] += c1 * st.ev.value()[a];
            uh[1] += c2 * st.ev.value()[a];
            gh.row(0) += c1 * st.ev.gradient().row(a);
            gh.row(1) += c2 * st.ev.gradient().row(a);
          }
          const double eu = (c.velocity(q.x) - uh).squaredNorm();
          const double eg = (c.velocity_grad(q.x) - gh).squaredNorm();
          double ph = 0.0;
          if (e >= 0) {
            pressure.eval(e, q.x, st.psi);
            ph = pressure_coeffs.segment(e * nl, nl).dot(st.psi);
          }
          const double ep = c.pressure(q.x) - ph;
          s.l2 += q.weight * eu;
          s.h1 += q.weight * (eu + eg);
          s.p += q.weight * ep * ep;
        }
      },
      [&](int, const FlowSums& s) {
        total.l2 += s.l2;
        total.h1 += s.h1;
        total.p += s.p;
      });
  FlowErrors out;
  out.velocity_l2 = std::sqrt(total.l2);
  out.velocity_h1 = std::sqrt(total.h1);
  out.pressure_l2 = std::sqrt(total.p);
  out.combined = out.velocity_h1 + out.pressure_l2;
  return out;
}

double eoc(double e0, double e1, double h0, double h1) {
  if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1)
    return std::numeric_limits<double>::quiet_NaN();
  return std::log(e0 / e1) / std::log(h0 / h1);
}

double median(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TensorGrid make_grid(const GridSpec& spec, int level) {
  if (level < 0) throw ConfigurationError("refinement level must be >= 0");
  if (spec.degree < 1 || spec.degree > kMaxDegree)
    throw ConfigurationError("spline degree must lie in [1, " + std::to_string(kMaxDegree) + "]");
  TensorGrid grid = [&] {
    if (spec.kind == "uniform") return TensorGrid::uniform(spec.box, spec.cells, spec.degree);
    if (spec.kind == "graded")
      return TensorGrid::graded(spec.box, spec.cells, spec.degree, spec.ratio, spec.toward_hi);
    if (spec.kind == "explicit") {
      for (const auto& axis : spec.breakpoints)
        for (std::size_t i = 1; i < axis.size(); ++i)
          if (axis[i] < axis[i - 1])
            throw ConfigurationError("explicit breakpoints must be nondecreasing");
      return TensorGrid(spec.breakpoints, {spec.degree, spec.degree});
    }
    throw ConfigurationError("unknown grid kind '" + spec.kind + "'");
  }();
  for (int k = 0; k < level; ++k) grid = grid.refined();
  return grid;
}

void compute_eoc(ConvergenceReport& report) {
  report.eoc.clear();
  if (report.levels.empty()) return;
  for (const auto& [name, _] : report.levels.front().errors) {
    std::vector<double> rates;
    for (std::size_t k = 0; k + 1 < report.levels.size(); ++k) {
      const auto& a = report.levels[k];
      const auto& b = report.levels[k + 1];
      const auto ea = a.errors.find(name), eb = b.errors.find(name);
      if (ea == a.errors.end() || eb == b.errors.end()) break;
      rates.push_back(eoc(ea->second, eb->second, a.h, b.h));
    }
    report.eoc[name] = rates;
  }
}

namespace {

void dump(const StudySettings& s, int level, const std::string& name, const SparseMatrix& m) {
  if (s.dump_dir.empty()) return;
  std::filesystem::create_directories(s.dump_dir);
  std::ofstream os(std::filesystem::path(s.dump_dir) /
                   ("level" + std::to_string(level) + "_" + name + ".txt"));
  write_triplets(os, m);
}

// Without an exact solution only the size of u_h is reported.
void solution_norms(const WebBasis& basis, const DomainQuadrature& quad,
                    const Eigen::VectorXd& coeffs, double p, LevelRecord& rec) {
  const ScalarErrors e = scalar_errors(
      basis, quad, coeffs, [](const Point&) { return 0.0; },
      [](const Point&) { return Point(Point::Zero()); }, p);
  rec.diagnostics["solution_l2"] = e.l2;
  rec.diagnostics["solution_h1"] = e.h1;
}

void solve_level(const ManufacturedCase& c, const StudySettings& s, int level, LevelRecord& rec) {
  const TensorGrid grid = make_grid(s.grid, level);
  rec.cells = grid.cells();
  rec.h = grid.meshsize();
  const WebBasis basis(grid, c.domain, s.classification_samples);
  rec.basis = basis.summary();
  const DomainQuadrature quad(c.domain, basis.grid(), basis.classification(), s.quadrature);
  const DomainQuadrature equad(c.domain, basis.grid(), basis.classification(),
                               {s.quadrature.gauss + 1, s.quadrature.depth, s.quadrature.leaf});
  rec.diagnostics["quadrature_points"] = static_cast<double>(quad.total_points());
  switch (c.kind) {
    case ProblemKind::Vcpe: {
      if (!s.dump_dir.empty()) dump(s, level, "A", assemble_vcpe(basis, quad, c.a, c.f).A);
      const LinearSolution sol = solve_vcpe(basis, quad, c.a, c.f, s.solver);
      rec.iterations = sol.iterations;
      rec.history = sol.history;
      if (!c.u) {
        solution_norms(basis, equad, sol.coeffs, 2.0, rec);
        break;
      }
      const ScalarErrors e = scalar_errors(basis, equad, sol.coeffs, c.u, c.grad_u, 2.0);
      rec.errors["l2"] = e.l2;
      rec.errors["h1"] = e.h1;
      break;
    }
    case ProblemKind::PLaplace: {
      const PlapSolution sol = solve_plap(basis, quad, c.p, c.f, s.solver);
      if (!s.dump_dir.empty())
        dump(s, level, "jacobian", assemble_plap(basis, quad, sol.coeffs, c.p, s.solver.eps_final, c.f).jacobian);
      rec.iterations = sol.iterations;
      rec.history = sol.final_residuals;
      rec.diagnostics["final_residual"] = sol.final_residuals.empty() ? 0.0 : sol.final_residuals.back();
      if (!c.u) {
        solution_norms(basis, equad, sol.coeffs, c.p, rec);
        break;
      }
      const ScalarErrors e = scalar_errors(basis, equad, sol.coeffs, c.u, c.grad_u, c.p);
      rec.errors["l2"] = e.l2;
      rec.errors["h1"] = e.h1;
      rec.errors["w1p"] = e.w1p;
      rec.errors["quasi"] = e.quasi;
      const Eigen::VectorXd proj = project(basis, c.u);
      const ScalarErrors ep = scalar_errors(basis, equad, proj, c.u, c.grad_u, c.p);
      rec.diagnostics["quasi_projection"] = ep.quasi;
      break;
    }
    case ProblemKind::QuasiNewtonian: {
      const PressureSpace ps(basis, quad, s.pressure);
      const StokesSolution sol = solve_quasi_newtonian(basis, ps, quad, c.viscosity, c.phi, s.solver);
      if (!s.dump_dir.empty())
        dump(s, level, "mixed", assemble_mixed(basis, ps, quad, c.viscosity, sol.velocity, c.phi).K);
      rec.iterations = sol.iterations;
      rec.history = sol.updates;
      rec.diagnostics["max_divergence"] = sol.max_divergence;
      rec.diagnostics["pressure_mean"] = sol.pressure_mean;
      rec.diagnostics["pressure_dofs"] = ps.size();
      if (s.infsup) rec.diagnostics["infsup"] = estimate_infsup(basis, ps, quad);
      if (!c.velocity) {
        ManufacturedCase zero = c;
        zero.velocity = [](const Point&) { return Point(Point::Zero()); };
        zero.velocity_grad = [](const Point&) { return Eigen::Matrix2d(Eigen::Matrix2d::Zero()); };
        zero.pressure = [](const Point&) { return 0.0; };
        const FlowErrors e = flow_errors(basis, ps, equad, sol.velocity, sol.pressure, zero);
        rec.diagnostics["solution_velocity_h1"] = e.velocity_h1;
        rec.diagnostics["solution_pressure_l2"] = e.pressure_l2;
        break;
      }
      const FlowErrors e = flow_errors(basis, ps, equad, sol.velocity, sol.pressure, c);
      rec.errors["velocity_l2"] = e.velocity_l2;
      rec.errors["velocity_h1"] = e.velocity_h1;
      rec.errors["pressure_l2"] = e.pressure_l2;
      rec.errors["combined"] = e.combined;
      rec.diagnostics["pressure_projection_error"] = pressure_projection_error(ps, equad, c.pressure);
      break;
    }
  }
}

}  // namespace

ConvergenceReport run_convergence(const ManufacturedCase& c, const StudySettings& settings) {
  if (settings.levels < 3) throw ConfigurationError("a convergence study needs at least 3 levels");
  ConvergenceReport report;
  report.case_name = c.name;
  report.problem = to_string(c.kind);
  report.target_order = c.target_order;
  report.target_norm = c.target_norm;
  report.regularity = c.regularity;
  for (int level = 0; level < settings.levels; ++level) {
    LevelRecord rec;
    rec.level = level;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      solve_level(c, settings, level, rec);
    } catch (const std::exception& e) {
      report.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.levels.push_back(std::move(rec));
  }
  compute_eoc(report);
  return report;
}

}  // namespace webspline
