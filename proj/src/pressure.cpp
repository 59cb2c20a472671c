#include "webspline/pressure.hpp"

#include <cmath>
#include <limits>

#include "cell_loop.hpp"
#include "webspline/errors.hpp"

namespace webspline {

PressureSpace::PressureSpace(const WebBasis& velocity, const DomainQuadrature& quad,
                             PressureOptions opts)
    : opts_(opts), grid_(velocity.grid()) {
  if (opts_.degree < 0) throw ConfigurationError("pressure degree must be >= 0");
  if (opts_.macro < 1) throw ConfigurationError("pressure macro block size must be >= 1");
  const TensorGrid& grid = velocity.grid();
  const CellClassification& cls = velocity.classification();
  const auto cells = grid.cells();
  const int s = opts_.macro;
  const int nb0 = (cells[0] + s - 1) / s, nb1 = (cells[1] + s - 1) / s;
  auto block_of = [&](int cell_id) {
    const Index2 c = grid.cell_index(cell_id);
    return (c[0] / s) * nb1 + c[1] / s;
  };

  std::vector<Box> block_box(static_cast<std::size_t>(nb0) * nb1);
  std::vector<bool> has_cells(block_box.size(), false), root(block_box.size(), false);
  for (int id : quad.cells()) {
    const int b = block_of(id);
    const Box box = grid.cell_box(grid.cell_index(id));
    if (!has_cells[b]) {
      block_box[b] = box;
      has_cells[b] = true;
    } else {
      block_box[b].lo = block_box[b].lo.cwiseMin(box.lo);
      block_box[b].hi = block_box[b].hi.cwiseMax(box.hi);
    }
    if (cls.kind[id] == CellKind::Interior) root[b] = true;
  }

  std::vector<int> block_element(block_box.size(), -1);
  for (std::size_t b = 0; b < block_box.size(); ++b)
    if (root[b]) {
      block_element[b] = static_cast<int>(center_.size());
      center_.push_back(block_box[b].center());
      half_.push_back(0.5 * block_box[b].size());
    }
  if (center_.empty()) throw ConfigurationError("pressure space is empty: no block holds an interior cell");
  for (std::size_t b = 0; b < block_box.size(); ++b) {
    if (!has_cells[b] || root[b]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < num_elements(); ++e) {
      const double d = (center_[e] - block_box[b].center()).norm();
      if (d < best) {
        best = d;
        block_element[b] = e;
      }
    }
  }
  cell_element_.assign(grid.num_cells(), -1);
  for (int id : quad.cells()) cell_element_[id] = block_element[block_of(id)];

  const int nl = local_size();
  std::vector<Eigen::MatrixXd> gram(num_elements(), Eigen::MatrixXd::Zero(nl, nl));
  transform_.assign(num_elements(), Eigen::MatrixXd::Identity(nl, nl));
  Eigen::VectorXd mono;
  for (std::size_t n = 0; n < quad.cells().size(); ++n) {
    const int e = cell_element_[quad.cells()[n]];
    for (const auto& q : quad.points(static_cast<int>(n))) {
      monomials(e, q.x, mono);
      gram[e].noalias() += q.weight * mono * mono.transpose();
    }
  }
  mean_.setZero(size());
  for (int e = 0; e < num_elements(); ++e) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram[e]);
    if (llt.info() != Eigen::Success)
      throw ConfigurationError("pressure element " + std::to_string(e) +
                               " has a singular local mass matrix; lower the pressure degree");
    transform_[e] = llt.matrixL().solve(Eigen::MatrixXd::Identity(nl, nl));
    transform_[e] = transform_[e].triangularView<Eigen::Lower>();
  }
  Eigen::VectorXd psi;
  for (std::size_t n = 0; n < quad.cells().size(); ++n) {
    const int e = cell_element_[quad.cells()[n]];
    for (const auto& q : quad.points(static_cast<int>(n))) {
      eval(e, q.x, psi);
      mean_.segment(e * nl, nl) += q.weight * psi;
    }
  }
}

void PressureSpace::monomials(int element, const Point& x, Eigen::VectorXd& out) const {
  const int q = opts_.degree;
  out.resize(local_size());
  const double xi = (x[0] - center_[element][0]) / half_[element][0];
  const double eta = (x[1] - center_[element][1]) / half_[element][1];
  double pa = 1.0;
  for (int a = 0; a <= q; ++a) {
    double pb = 1.0;
    for (int b = 0; b <= q; ++b) {
      out[a * (q + 1) + b] = pa * pb;
      pb *= eta;
    }
    pa *= xi;
  }
}

void PressureSpace::eval(int element, const Point& x, Eigen::VectorXd& out) const {
  Eigen::VectorXd mono;
  monomials(element, x, mono);
  out.noalias() = transform_[element] * mono;
}

double PressureSpace::value(const Eigen::VectorXd& coeffs, const Point& x) const {
  const Index2 c = grid_.locate(x);
  if (c[0] < 0) return 0.0;
  const int e = cell_element_[grid_.cell_id(c)];
  if (e < 0) return 0.0;
  Eigen::VectorXd psi;
  eval(e, x, psi);
  return coeffs.segment(e * local_size(), local_size()).dot(psi);
}

Eigen::VectorXd PressureSpace::project(const DomainQuadrature& quad, const ScalarField& p) const {
  const int nl = local_size();
  std::vector<Eigen::MatrixXd> gram(num_elements(), Eigen::MatrixXd::Zero(nl, nl));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size());
  Eigen::VectorXd psi;
  for (std::size_t n = 0; n < quad.cells().size(); ++n) {
    const int e = cell_element_.at(quad.cells()[n]);
    if (e < 0) continue;
    for (const auto& q : quad.points(static_cast<int>(n))) {
      eval(e, q.x, psi);
      gram[e].noalias() += q.weight * psi * psi.transpose();
      rhs.segment(e * nl, nl) += (q.weight * p(q.x)) * psi;
    }
  }
  Eigen::VectorXd c(size());
  for (int e = 0; e < num_elements(); ++e)
    c.segment(e * nl, nl) = gram[e].llt().solve(rhs.segment(e * nl, nl));
  return c;
}

double pressure_projection_error(const PressureSpace& space, const DomainQuadrature& quad,
                                 const ScalarField& p) {
  const Eigen::VectorXd c = space.project(quad, p);
  const int nl = space.local_size();
  Eigen::VectorXd psi;
  double total = 0.0;
  for (std::size_t n = 0; n < quad.cells().size(); ++n) {
    const int e = space.element_of_cell(quad.cells()[n]);
    double sum = 0.0;
    for (const auto& q : quad.points(static_cast<int>(n))) {
      double ph = 0.0;
      if (e >= 0) {
        space.eval(e, q.x, psi);
        ph = c.segment(e * nl, nl).dot(psi);
      }
      const double d = p(q.x) - ph;
      sum += q.weight * d * d;
    }
    total += sum;
  }
  return std::sqrt(total);
}

Viscosity carreau(double a0, double a_inf, double r) {
  if (!(a0 > 0.0) || !(a_inf > 0.0)) throw DomainError("Carreau viscosities must be positive");
  return [=](double s) { return a_inf + (a0 - a_inf) * std::pow(1.0 + s, 0.5 * (r - 2.0)); };
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct MixedLocal {
  const std::vector<int>* active = nullptr;
  int element = -1;
  Eigen::MatrixXd a11, a12, a22, b1, b2, gram1;
  Eigen::VectorXd f1, f2;
};

struct MixedState {
  WebBasis::Evaluator ev;
  Eigen::VectorXd psi;
};

enum class MixedPart { Full, Divergence, Gram };

void mixed_loop(const WebBasis& vb, const PressureSpace* ps, const DomainQuadrature& quad,
                const Viscosity* a_fn, const Eigen::VectorXd* prev, const VectorField* phi,
                MixedPart part, Triplets& trip, Eigen::VectorXd* rhs) {
  const int nv = vb.size();
  const int nl = ps ? ps->local_size() : 0;
  detail::cell_loop<MixedState, MixedLocal>(
      static_cast<int>(quad.cells().size()), [&] { return MixedState{WebBasis::Evaluator(vb), {}}; },
      [&](MixedState& st, int n, MixedLocal& loc) {
        const int cell = quad.cells()[n];
        loc.active = &vb.active(cell);
        loc.element = ps ? ps->element_of_cell(cell) : -1;
        const auto na = static_cast<Eigen::Index>(loc.active->size());
        loc.a11.setZero(na, na);
        loc.a12.setZero(na, na);
        loc.a22.setZero(na, na);
        loc.gram1.setZero(na, na);
        loc.b1.setZero(nl, na);
        loc.b2.setZero(nl, na);
        loc.f1.setZero(na);
        loc.f2.setZero(na);
        Eigen::VectorXd cl1(na), cl2(na);
        if (prev)
          for (Eigen::Index a = 0; a < na; ++a) {
            cl1[a] = (*prev)[(*loc.active)[a]];
            cl2[a] = (*prev)[nv + (*loc.active)[a]];
          }
        for (const auto& q : quad.points(n)) {
          st.ev.at(cell, q.x);
          const auto& g = st.ev.gradient();
          const auto gx = g.col(0), gy = g.col(1);
          if (part == MixedPart::Gram) {
            loc.gram1.noalias() += q.weight * (gx * gx.transpose() + gy * gy.transpose() +
                                               st.ev.value() * st.ev.value().transpose());
            continue;
          }
          if (loc.element >= 0) {
            ps->eval(loc.element, q.x, st.psi);
            loc.b1.noalias() -= q.weight * st.psi * gx.transpose();
            loc.b2.noalias() -= q.weight * st.psi * gy.transpose();
          }
          if (part == MixedPart::Divergence) continue;
          double s = 0.0;
          if (prev) {
            const double d11 = gx.dot(cl1), d22 = gy.dot(cl2);
            const double d12 = 0.5 * (gy.dot(cl1) + gx.dot(cl2));
            s = d11 * d11 + d22 * d22 + 2.0 * d12 * d12;
          }
          const double av = (*a_fn)(s);
          if (!(av > 0.0) || !std::isfinite(av))
            throw DomainError("viscosity is not positive and finite at a quadrature point");
          const double wa = q.weight * av;
          loc.a11.noalias() += wa * (gx * gx.transpose() + 0.5 * gy * gy.transpose());
          loc.a22.noalias() += wa * (gy * gy.transpose() + 0.5 * gx * gx.transpose());
          loc.a12.noalias() += (0.5 * wa) * gy * gx.transpose();
          const Point f = (*phi)(q.x);
          loc.f1 += (q.weight * f[0]) * st.ev.value();
          loc.f2 += (q.weight * f[1]) * st.ev.value();
        }
      },
      [&](int, const MixedLocal& loc) {
        const auto& act = *loc.active;
        const auto na = static_cast<Eigen::Index>(act.size());
        if (part == MixedPart::Gram) {
          for (Eigen::Index b = 0; b < na; ++b)
            for (Eigen::Index a = 0; a < na; ++a) {
              trip.emplace_back(act[a], act[b], loc.gram1(a, b));
              trip.emplace_back(nv + act[a], nv + act[b], loc.gram1(a, b));
            }
          return;
        }
        const int prow = part == MixedPart::Full ? 2 * nv : 0;
        if (part == MixedPart::Full) {
          for (Eigen::Index b = 0; b < na; ++b)
            for (Eigen::Index a = 0; a < na; ++a) {
              trip.emplace_back(act[a], act[b], loc.a11(a, b));
              trip.emplace_back(nv + act[a], nv + act[b], loc.a22(a, b));
              trip.emplace_back(act[a], nv + act[b], loc.a12(a, b));
              trip.emplace_back(nv + act[b], act[a], loc.a12(a, b));
            }
          for (Eigen::Index a = 0; a < na; ++a) {
            (*rhs)[act[a]] += loc.f1[a];
            (*rhs)[nv + act[a]] += loc.f2[a];
          }
        }
        if (loc.element < 0) return;
        for (int l = 0; l < nl; ++l) {
          const int row = prow + loc.element * nl + l;
          for (Eigen::Index a = 0; a < na; ++a) {
            trip.emplace_back(row, act[a], loc.b1(l, a));
            trip.emplace_back(row, nv + act[a], loc.b2(l, a));
            if (part == MixedPart::Full) {
              trip.emplace_back(act[a], row, loc.b1(l, a));
              trip.emplace_back(nv + act[a], row, loc.b2(l, a));
            }
          }
        }
      });
}

}  // namespace

MixedSystem assemble_mixed(const WebBasis& velocity, const PressureSpace& pressure,
                           const DomainQuadrature& quad, const Viscosity& a_fn,
                           const Eigen::VectorXd& velocity_prev, const VectorField& phi) {
  const int nv = velocity.size();
  if (velocity_prev.size() != 0 && velocity_prev.size() != 2 * nv)
    throw DomainError("velocity iterate has the wrong size");
  if (pressure.size() == 0) throw ConfigurationError("pressure space is empty");
  MixedSystem sys;
  sys.velocity_size = 2 * nv;
  sys.pressure_size = pressure.size();
  const int n = 2 * nv + pressure.size() + 1;
  sys.rhs.setZero(n);
  Triplets trip;
  mixed_loop(velocity, &pressure, quad, &a_fn, velocity_prev.size() ? &velocity_prev : nullptr,
             &phi, MixedPart::Full, trip, &sys.rhs);
  const Eigen::VectorXd& m = pressure.mean_vector();
  for (int k = 0; k < pressure.size(); ++k) {
    trip.emplace_back(2 * nv + k, n - 1, m[k]);
    trip.emplace_back(n - 1, 2 * nv + k, m[k]);
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  return sys;
}

SparseMatrix assemble_divergence(const WebBasis& velocity, const PressureSpace& pressure,
                                 const DomainQuadrature& quad) {
  Triplets trip;
  mixed_loop(velocity, &pressure, quad, nullptr, nullptr, nullptr, MixedPart::Divergence, trip,
             nullptr);
  SparseMatrix b(pressure.size(), 2 * velocity.size());
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  return b;
}

SparseMatrix assemble_velocity_gram(const WebBasis& velocity, const DomainQuadrature& quad) {
  Triplets trip;
  mixed_loop(velocity, nullptr, quad, nullptr, nullptr, nullptr, MixedPart::Gram, trip, nullptr);
  SparseMatrix g(2 * velocity.size(), 2 * velocity.size());
  g.setFromTriplets(trip.begin(), trip.end());
  g.makeCompressed();
  return g;
}

}  // namespace webspline
