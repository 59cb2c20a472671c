#include "webspline/cases.hpp"

#include <cmath>
#include <limits>

#include "webspline/errors.hpp"

namespace webspline {

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Vcpe: return "vcpe";
    case ProblemKind::PLaplace: return "plap";
    case ProblemKind::QuasiNewtonian: return "quasi_newtonian";
  }
  return "?";
}

namespace {

// Value, gradient and Hessian of a smooth function at one point.
struct Jet {
  double v = 0.0;
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
};

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.g * b.v + a.v * b.g;
  r.h = a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

Jet operator*(double s, Jet a) {
  a.v *= s;
  a.g *= s;
  a.h *= s;
  return a;
}

Jet operator+(Jet a, const Jet& b) {
  a.v += b.v;
  a.g += b.g;
  a.h += b.h;
  return a;
}

Jet constant(double c) {
  Jet j;
  j.v = c;
  return j;
}

Jet coord(const Point& x, int axis) {
  Jet j;
  j.v = x[axis];
  j.g[axis] = 1.0;
  return j;
}

Jet radius2(const Point& x) {
  Jet j;
  j.v = x.squaredNorm();
  j.g = 2.0 * x;
  j.h = 2.0 * Eigen::Matrix2d::Identity();
  return j;
}

// exp(s * x_axis)
Jet exp_axis(const Point& x, int axis, double s) {
  Jet j;
  const double e = std::exp(s * x[axis]);
  j.v = e;
  j.g[axis] = s * e;
  j.h(axis, axis) = s * s * e;
  return j;
}

Jet cos_axis(const Point& x, int axis) {
  Jet j;
  j.v = std::cos(x[axis]);
  j.g[axis] = -std::sin(x[axis]);
  j.h(axis, axis) = -std::cos(x[axis]);
  return j;
}

using JetFn = std::function<Jet(const Point&)>;

void set_scalar(ManufacturedCase& c, const JetFn& jet) {
  c.u = [jet](const Point& x) { return jet(x).v; };
  c.grad_u = [jet](const Point& x) { return Point(jet(x).g); };
}

// f = -div(a ∇u)
ScalarField poisson_source(const JetFn& u, const JetFn& a) {
  return [u, a](const Point& x) {
    const Jet uj = u(x), aj = a(x);
    return -(aj.g.dot(uj.g) + aj.v * uj.h.trace());
  };
}

// f = -div(|∇u|^{p-2} ∇u) + u
ScalarField plap_source(const JetFn& u, double p) {
  return [u, p](const Point& x) {
    const Jet j = u(x);
    const double s = j.g.norm();
    if (s == 0.0) {
      if (p == 2.0) return -j.h.trace() + j.v;
      if (p > 2.0) return j.v;
      return std::numeric_limits<double>::infinity();
    }
    const double lap = std::pow(s, p - 2.0) * j.h.trace();
    const double cross = (p - 2.0) * std::pow(s, p - 4.0) * j.g.dot(j.h * j.g);
    return -(lap + cross) + j.v;
  };
}

ManufacturedCase disk_poisson(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "disk_poisson";
  c.kind = ProblemKind::Vcpe;
  c.description = "u = (1-r^2) exp(x/2) cos y, a = 1 + x^2/2 + y/4 on the unit disk";
  const JetFn u = [](const Point& x) {
    return (constant(1.0) + -1.0 * radius2(x)) * exp_axis(x, 0, 0.5) * cos_axis(x, 1);
  };
  const JetFn a = [](const Point& x) {
    return constant(1.0) + 0.5 * (coord(x, 0) * coord(x, 0)) + 0.25 * coord(x, 1);
  };
  set_scalar(c, u);
  c.a = [a](const Point& x) { return a(x).v; };
  c.f = poisson_source(u, a);
  c.target_order = prm.degree;
  c.target_norm = "h1";
  c.regularity = "smooth (H^{m+1})";
  return c;
}

ManufacturedCase disk_poisson_polynomial(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "disk_poisson_polynomial";
  c.kind = ProblemKind::Vcpe;
  c.description = "u = 1 - r^2, a = 1, f = 4 on the unit disk (contained in the web space)";
  const JetFn u = [](const Point& x) { return constant(1.0) + -1.0 * radius2(x); };
  set_scalar(c, u);
  c.a = [](const Point&) { return 1.0; };
  c.f = [](const Point&) { return 4.0; };
  c.target_order = prm.degree;
  c.target_norm = "h1";
  c.regularity = "polynomial";
  return c;
}

ManufacturedCase annulus_poisson(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "annulus_poisson";
  c.kind = ProblemKind::Vcpe;
  c.domain = ImplicitDomain::disk(Point::Zero(), 1.0) & !ImplicitDomain::disk(Point::Zero(), 0.4);
  c.description = "u = (1-r^2)(r^2-0.16) cos x, a = 1 + x^2/2 on the annulus 0.4 < r < 1";
  const JetFn u = [](const Point& x) {
    const Jet r2 = radius2(x);
    return (constant(1.0) + -1.0 * r2) * (r2 + constant(-0.16)) * cos_axis(x, 0);
  };
  const JetFn a = [](const Point& x) { return constant(1.0) + 0.5 * (coord(x, 0) * coord(x, 0)); };
  set_scalar(c, u);
  c.a = [a](const Point& x) { return a(x).v; };
  c.f = poisson_source(u, a);
  c.target_order = prm.degree;
  c.target_norm = "h1";
  c.regularity = "smooth (H^{m+1})";
  return c;
}

// cos(pi r^2 / 2): vanishes on the unit circle, and its only critical point
// (the origin) is degenerate with |∇u| ~ r^3, which keeps the p-Laplacian
// source bounded for p > 4/3.
Jet cos_bump(const Point& x) {
  Jet j;
  const double t = 0.5 * M_PI * x.squaredNorm();
  const Eigen::Vector2d gt = M_PI * x;
  j.v = std::cos(t);
  j.g = -std::sin(t) * gt;
  j.h = -std::cos(t) * gt * gt.transpose() - std::sin(t) * M_PI * Eigen::Matrix2d::Identity();
  return j;
}

ManufacturedCase plap_smooth(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "plap_smooth";
  c.kind = ProblemKind::PLaplace;
  c.p = prm.p;
  c.description = "u = cos(pi r^2 / 2) on the unit disk";
  set_scalar(c, cos_bump);
  c.f = plap_source(cos_bump, prm.p);
  c.target_order = 1.0;
  c.target_norm = "quasi";
  c.regularity = prm.p < 2.0 ? "C^{2,2/p-1}" : "W^{1,inf} and W^{2,2}";
  return c;
}

ManufacturedCase plap_radial(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "plap_radial";
  c.kind = ProblemKind::PLaplace;
  c.p = prm.p;
  c.description = "u = 1 - r^{3/2} on the unit disk (second derivatives ~ r^{-1/2})";
  const double p = prm.p;
  c.u = [](const Point& x) { return 1.0 - std::pow(x.norm(), 1.5); };
  c.grad_u = [](const Point& x) {
    const double r = x.norm();
    return r > 0.0 ? Point(-1.5 / std::sqrt(r) * x) : Point(Point::Zero());
  };
  c.f = [p](const Point& x) {
    const double r = x.norm();
    return std::pow(1.5, p - 1.0) * 0.5 * (p + 1.0) * std::pow(r, 0.5 * (p - 3.0)) + 1.0 -
           std::pow(r, 1.5);
  };
  c.target_order = p < 2.0 ? 0.5 * p : 1.0;
  c.target_norm = "quasi";
  c.regularity = p < 2.0 ? "W^{2,p}" : "W^{1,inf} and W^{2,2}";
  return c;
}

ManufacturedCase plap_polynomial(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "plap_polynomial";
  c.kind = ProblemKind::PLaplace;
  c.p = prm.p;
  c.description = "u = 1 - r^2 on the unit disk (contained in the web space)";
  const double p = prm.p;
  set_scalar(c, [](const Point& x) { return constant(1.0) + -1.0 * radius2(x); });
  c.f = [p](const Point& x) {
    const double r = x.norm();
    return std::pow(2.0, p - 1.0) * p * std::pow(r, p - 2.0) + 1.0 - r * r;
  };
  c.target_order = 1.0;
  c.target_norm = "quasi";
  c.regularity = "polynomial";
  return c;
}

ManufacturedCase stokes_carreau(const CaseParams& prm) {
  ManufacturedCase c;
  c.name = "stokes_carreau";
  c.kind = ProblemKind::QuasiNewtonian;
  c.description = "u = (-4y(1-r^2), 4x(1-r^2)), p = xy, Carreau viscosity on the unit disk";
  const JetFn u1 = [](const Point& x) {
    return -4.0 * coord(x, 1) * (constant(1.0) + -1.0 * radius2(x));
  };
  const JetFn u2 = [](const Point& x) {
    return 4.0 * coord(x, 0) * (constant(1.0) + -1.0 * radius2(x));
  };
  c.velocity = [u1, u2](const Point& x) { return Point(u1(x).v, u2(x).v); };
  c.velocity_grad = [u1, u2](const Point& x) {
    Eigen::Matrix2d g;
    g.row(0) = u1(x).g.transpose();
    g.row(1) = u2(x).g.transpose();
    return g;
  };
  c.pressure = [](const Point& x) { return x[0] * x[1]; };
  const double a0 = prm.a0, ainf = prm.a_inf, r = prm.r_carreau;
  c.viscosity = carreau(a0, ainf, r);
  const Viscosity a = c.viscosity;
  const auto da = [=](double s) { return (a0 - ainf) * 0.5 * (r - 2.0) * std::pow(1.0 + s, 0.5 * (r - 4.0)); };
  // φ_i = -Σ_j ∂_j(a(S) D_ij) + ∂_i p with S = D:D.
  c.phi = [u1, u2, a, da](const Point& x) {
    const Jet j[2] = {u1(x), u2(x)};
    Eigen::Matrix2d d;
    Eigen::Matrix2d dd[2];  // dd[k](i, j) = ∂_k D_ij
    for (int i = 0; i < 2; ++i)
      for (int jj = 0; jj < 2; ++jj) {
        d(i, jj) = 0.5 * (j[i].g[jj] + j[jj].g[i]);
        for (int k = 0; k < 2; ++k) dd[k](i, jj) = 0.5 * (j[i].h(jj, k) + j[jj].h(i, k));
      }
    const double s = (d.array() * d.array()).sum();
    const double av = a(s), dav = da(s);
    Point out;
    for (int i = 0; i < 2; ++i) {
      double sum = 0.0;
      for (int k = 0; k < 2; ++k) {
        const double dks = 2.0 * (d.array() * dd[k].array()).sum();
        sum += dav * dks * d(i, k) + av * dd[k](i, k);
      }
      const double dp = i == 0 ? x[1] : x[0];
      out[i] = -sum + dp;
    }
    return out;
  };
  c.target_order = 1.0;
  c.target_norm = "combined";
  c.regularity = "smooth";
  return c;
}

}  // namespace

std::vector<std::string> case_names() {
  return {"disk_poisson",    "disk_poisson_polynomial", "annulus_poisson", "plap_smooth",
          "plap_radial",     "plap_polynomial",         "stokes_carreau"};
}

ManufacturedCase manufactured_case(const std::string& name, const CaseParams& params) {
  if (params.degree < 1) throw ConfigurationError("spline degree must be >= 1");
  if (!(params.p > 1.0))
    throw ConfigurationError("p must lie in the admissible range (1, inf)");
  if (name == "disk_poisson") return disk_poisson(params);
  if (name == "disk_poisson_polynomial") return disk_poisson_polynomial(params);
  if (name == "annulus_poisson") return annulus_poisson(params);
  if (name == "plap_smooth") return plap_smooth(params);
  if (name == "plap_radial") return plap_radial(params);
  if (name == "plap_polynomial") return plap_polynomial(params);
  if (name == "stokes_carreau") {
    if (!(params.a0 > 0.0) || !(params.a_inf > 0.0))
      throw ConfigurationError("Carreau viscosities must be positive");
    return stokes_carreau(params);
  }
  std::string known;
  for (const auto& n : case_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigurationError("unknown manufactured case '" + name + "' (known: " + known + ")");
}

}  // namespace webspline
