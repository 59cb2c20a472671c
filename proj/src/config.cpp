#include "webspline/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "webspline/errors.hpp"

namespace webspline {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigurationError((path.empty() ? std::string("config") : path) + ": " + msg);
}

// Reads one JSON object and remembers which keys were consumed, so that the
// rest can be rejected as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& at(const std::string& key) {
    if (!has(key)) fail(sub(key), "missing required key");
    return j_.at(key);
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number()) fail(sub(key), "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) fail(sub(key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) fail(sub(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const Json& v = j_.at(key);
    if (!v.is_string()) fail(sub(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!used_.count(key)) fail(sub(key), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Point point(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(path, "expected a pair of numbers");
  return Point(v[0].get<double>(), v[1].get<double>());
}

Json point_json(const Point& x) { return Json::array({x[0], x[1]}); }

ImplicitDomain node_from_json(const Json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1)
    fail(path, "a domain node is an object with exactly one of disk, box, half_plane, and, or, not");
  const std::string key = j.begin().key();
  const Json& body = j.begin().value();
  const std::string sub = path + "." + key;
  if (key == "disk") {
    Reader r(body, sub);
    const Point c = point(r.at("center"), sub + ".center");
    const double radius = r.number("radius", 1.0);
    r.finish();
    if (!(radius > 0.0)) fail(sub + ".radius", "must be positive");
    return ImplicitDomain::disk(c, radius);
  }
  if (key == "box") {
    Reader r(body, sub);
    const Point lo = point(r.at("lo"), sub + ".lo");
    const Point hi = point(r.at("hi"), sub + ".hi");
    r.finish();
    if (!(lo[0] < hi[0] && lo[1] < hi[1])) fail(sub, "lo must be below hi");
    return ImplicitDomain::box(lo, hi);
  }
  if (key == "half_plane") {
    Reader r(body, sub);
    const Point n = point(r.at("normal"), sub + ".normal");
    const double offset = r.number("offset", 0.0);
    r.finish();
    if (!(n.norm() > 0.0)) fail(sub + ".normal", "must be nonzero");
    return ImplicitDomain::half_plane(n, offset);
  }
  if (key == "and" || key == "or") {
    if (!body.is_array() || body.size() < 2) fail(sub, "expected a list of at least two nodes");
    ImplicitDomain d = node_from_json(body[0], sub + "[0]");
    for (std::size_t i = 1; i < body.size(); ++i) {
      const ImplicitDomain e = node_from_json(body[i], sub + "[" + std::to_string(i) + "]");
      d = key == "and" ? (d & e) : (d | e);
    }
    return d;
  }
  if (key == "not") return !node_from_json(body, sub);
  fail(sub, "unknown domain primitive");
}

Json node_to_json(const ImplicitDomain::Node& n) {
  using Kind = ImplicitDomain::Node::Kind;
  switch (n.kind) {
    case Kind::Disk: return {{"disk", {{"center", point_json(n.p0)}, {"radius", n.scalar}}}};
    case Kind::Box: return {{"box", {{"lo", point_json(n.p0)}, {"hi", point_json(n.p1)}}}};
    case Kind::HalfPlane:
      return {{"half_plane", {{"normal", point_json(n.p0)}, {"offset", n.scalar}}}};
    case Kind::And: return {{"and", Json::array({node_to_json(*n.lhs), node_to_json(*n.rhs)})}};
    case Kind::Or: return {{"or", Json::array({node_to_json(*n.lhs), node_to_json(*n.rhs)})}};
    case Kind::Not: return {{"not", node_to_json(*n.lhs)}};
  }
  return nullptr;
}

const char* leaf_name(LeafRule leaf) { return leaf == LeafRule::Linear ? "linear" : "center"; }

ProblemKind problem_kind(const std::string& s, const std::string& path) {
  if (s == "vcpe") return ProblemKind::Vcpe;
  if (s == "plap") return ProblemKind::PLaplace;
  if (s == "quasi_newtonian") return ProblemKind::QuasiNewtonian;
  fail(path, "unknown problem type '" + s + "' (vcpe, plap, quasi_newtonian)");
}

void parse_domain(const Json& doc, RunConfig& c) {
  Reader r(doc, "domain");
  c.exponent = r.number("exponent", 1.0);
  if (!(c.exponent > 0.0)) fail("domain.exponent", "must be positive");
  if (r.has("shape")) {
    c.domain = r.at("shape");
    node_from_json(c.domain, "domain.shape");
  }
  r.finish();
}

void parse_grid(const Json& doc, GridSpec& g) {
  Reader r(doc, "grid");
  g.kind = r.string("kind", g.kind);
  if (g.kind != "uniform" && g.kind != "graded" && g.kind != "explicit")
    fail("grid.kind", "expected uniform, graded or explicit");
  g.degree = r.integer("degree", g.degree);
  if (g.degree < 1 || g.degree > kMaxDegree)
    fail("grid.degree", "must lie in [1, " + std::to_string(kMaxDegree) + "]");
  if (r.has("box")) {
    const Json& b = r.at("box");
    if (!b.is_array() || b.size() != 2) fail("grid.box", "expected [[xlo, ylo], [xhi, yhi]]");
    g.box = {point(b[0], "grid.box[0]"), point(b[1], "grid.box[1]")};
    if (!(g.box.lo[0] < g.box.hi[0] && g.box.lo[1] < g.box.hi[1]))
      fail("grid.box", "lower corner must be below the upper one");
  }
  if (r.has("cells")) {
    const Json& v = r.at("cells");
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
      fail("grid.cells", "expected two integers");
    g.cells = {v[0].get<int>(), v[1].get<int>()};
    if (g.cells[0] < 1 || g.cells[1] < 1) fail("grid.cells", "must be positive");
  }
  g.ratio = r.number("ratio", g.ratio);
  if (!(g.ratio > 0.0)) fail("grid.ratio", "must be positive");
  const std::string toward = r.string("toward", g.toward_hi ? "hi" : "lo");
  if (toward != "hi" && toward != "lo") fail("grid.toward", "expected hi or lo");
  g.toward_hi = toward == "hi";
  if (r.has("breakpoints")) {
    const Json& b = r.at("breakpoints");
    if (!b.is_array() || b.size() != 2) fail("grid.breakpoints", "expected two lists");
    for (int a = 0; a < 2; ++a) {
      const std::string path = "grid.breakpoints[" + std::to_string(a) + "]";
      if (!b[a].is_array() || b[a].size() < 2) fail(path, "expected at least two numbers");
      g.breakpoints[a].clear();
      for (const auto& v : b[a]) {
        if (!v.is_number()) fail(path, "expected numbers");
        g.breakpoints[a].push_back(v.get<double>());
      }
      for (std::size_t i = 1; i < g.breakpoints[a].size(); ++i)
        if (g.breakpoints[a][i] < g.breakpoints[a][i - 1]) fail(path, "must be nondecreasing");
    }
  }
  if (g.kind == "explicit" && g.breakpoints[0].empty())
    fail("grid.breakpoints", "required for an explicit grid");
  r.finish();
}

void parse_problem(const Json& doc, RunConfig& c) {
  Reader r(doc, "problem");
  ProblemSpec& p = c.problem;
  p.kind = problem_kind(r.string("type", "vcpe"), "problem.type");
  p.case_name = r.string("case", "");
  if (p.kind == ProblemKind::PLaplace) {
    p.p = r.number("p", 2.0);
    if (!(p.p > 1.0))
      fail("problem.p", "p = " + Json(p.p).dump() + " is not admissible; p must lie in (1, inf)");
  }
  if (p.kind == ProblemKind::QuasiNewtonian) {
    p.a0 = r.number("a0", p.a0);
    p.a_inf = r.number("a_inf", p.a_inf);
    p.r_carreau = r.number("r_carreau", p.r_carreau);
    if (!(p.a0 > 0.0) || !(p.a_inf > 0.0)) fail("problem", "Carreau viscosities must be positive");
    if (r.has("pressure")) {
      Reader pr(r.at("pressure"), "problem.pressure");
      c.study.pressure.degree = pr.integer("degree", c.study.pressure.degree);
      c.study.pressure.macro = pr.integer("macro", c.study.pressure.macro);
      pr.finish();
      if (c.study.pressure.degree < 0) fail("problem.pressure.degree", "must be >= 0");
      if (c.study.pressure.macro < 1) fail("problem.pressure.macro", "must be >= 1");
    }
    if (r.has("body_force")) p.body_force = point(r.at("body_force"), "problem.body_force");
  } else {
    if (r.has("source")) {
      if (!r.at("source").is_number()) fail("problem.source", "expected a constant");
      p.source = r.at("source").get<double>();
    }
    if (p.kind == ProblemKind::Vcpe) {
      p.coefficient = r.number("coefficient", 1.0);
      if (!(p.coefficient > 0.0)) fail("problem.coefficient", "must be positive");
    }
  }
  r.finish();
  const bool custom = p.source.has_value() || p.body_force.has_value();
  if (custom == !p.case_name.empty())
    fail("problem", p.kind == ProblemKind::QuasiNewtonian
                        ? "give exactly one of case and body_force"
                        : "give exactly one of case and source");
  if (custom && c.domain.is_null()) fail("domain.shape", "required with a custom source");
}

void parse_solver(const Json& doc, SolveOptions& s) {
  Reader r(doc, "solver");
  s.max_iterations = r.integer("max_iterations", s.max_iterations);
  s.linear_tolerance = r.number("linear_tolerance", s.linear_tolerance);
  s.nonlinear_tolerance = r.number("nonlinear_tolerance", s.nonlinear_tolerance);
  s.max_newton = r.integer("max_newton", s.max_newton);
  s.max_halvings = r.integer("max_halvings", s.max_halvings);
  s.eps_start = r.number("eps_start", s.eps_start);
  s.eps_final = r.number("eps_final", s.eps_final);
  s.p_step = r.number("p_step", s.p_step);
  s.max_picard = r.integer("max_picard", s.max_picard);
  s.picard_tolerance = r.number("picard_tolerance", s.picard_tolerance);
  r.finish();
  if (s.max_iterations < 1 || s.max_newton < 1 || s.max_picard < 1 || s.max_halvings < 0)
    fail("solver", "iteration limits must be positive");
  if (!(s.linear_tolerance > 0.0) || !(s.nonlinear_tolerance > 0.0) || !(s.picard_tolerance > 0.0))
    fail("solver", "tolerances must be positive");
  if (!(s.eps_final > 0.0) || s.eps_start < s.eps_final)
    fail("solver", "need 0 < eps_final <= eps_start");
  if (!(s.p_step > 0.0)) fail("solver.p_step", "must be positive");
}

void parse_checks(const Json& doc, std::vector<CheckSpec>& checks) {
  if (!doc.is_array()) fail("checks", "expected a list");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "checks[" + std::to_string(i) + "]";
    Reader r(doc[i], path);
    CheckSpec c;
    c.kind = r.string("kind", "");
    static const std::set<std::string> kinds = {"eoc", "diagnostic_eoc", "diagnostic_max",
                                                "diagnostic_ratio", "error_ratio"};
    if (!kinds.count(c.kind))
      fail(path + ".kind",
           "expected eoc, diagnostic_eoc, diagnostic_max, diagnostic_ratio or error_ratio");
    c.quantity = r.string("quantity", "");
    if (c.quantity.empty()) fail(path + ".quantity", "missing required key");
    if (c.kind == "error_ratio") {
      c.reference = r.string("reference", "");
      if (c.reference.empty()) fail(path + ".reference", "missing required key");
    }
    if (c.kind == "eoc" || c.kind == "diagnostic_eoc") {
      c.statistic = r.string("statistic", c.statistic);
      if (c.statistic != "median" && c.statistic != "min" && c.statistic != "last")
        fail(path + ".statistic", "expected median, min or last");
    }
    if (!r.has("bound")) fail(path + ".bound", "missing required key");
    c.bound = r.number("bound", 0.0);
    r.finish();
    checks.push_back(c);
  }
}

}  // namespace

ImplicitDomain domain_from_json(const Json& tree, double exponent) {
  return node_from_json(tree, "domain.shape").with_exponent(exponent);
}

Json domain_to_json(const ImplicitDomain& domain) { return node_to_json(*domain.root()); }

RunConfig parse_config(const Json& doc) {
  RunConfig c;
  Reader r(doc, "");
  c.name = r.string("name", "");
  if (c.name.empty()) fail("name", "missing required key");
  if (r.has("domain")) parse_domain(r.at("domain"), c);
  if (r.has("grid")) parse_grid(r.at("grid"), c.study.grid);
  parse_problem(r.at("problem"), c);
  if (r.has("quadrature")) {
    Reader q(r.at("quadrature"), "quadrature");
    c.study.quadrature.gauss = q.integer("gauss", c.study.quadrature.gauss);
    c.study.quadrature.depth = q.integer("depth", c.study.quadrature.depth);
    const std::string leaf = q.string("leaf", leaf_name(c.study.quadrature.leaf));
    if (leaf != "linear" && leaf != "center") fail("quadrature.leaf", "expected linear or center");
    c.study.quadrature.leaf = leaf == "linear" ? LeafRule::Linear : LeafRule::Center;
    q.finish();
    if (c.study.quadrature.gauss < 1 || c.study.quadrature.gauss > 20)
      fail("quadrature.gauss", "must lie in [1, 20]");
    if (c.study.quadrature.depth < 0 || c.study.quadrature.depth > 12)
      fail("quadrature.depth", "must lie in [0, 12]");
  }
  if (r.has("solver")) parse_solver(r.at("solver"), c.study.solver);
  c.study.levels = r.integer("levels", c.study.levels);
  if (c.study.levels < 3) fail("levels", "a convergence study needs at least 3 levels");
  c.study.classification_samples = r.integer("classification_samples", 5);
  if (c.study.classification_samples < 2) fail("classification_samples", "must be >= 2");
  c.study.infsup = r.boolean("infsup", c.study.infsup);
  if (r.has("checks")) parse_checks(r.at("checks"), c.checks);
  if (r.has("output")) {
    Reader o(r.at("output"), "output");
    c.output_dir = o.string("dir", "");
    c.dump_matrices = o.boolean("dump_matrices", false);
    o.finish();
  }
  if (c.output_dir.empty()) c.output_dir = "results/" + c.name;
  r.finish();
  // Catches an unknown case name or a domain that does not match the case.
  build_case(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError(path + ": cannot open config");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigurationError(path + ": " + e.what());
  }
  return parse_config(doc);
}

Json to_json(const RunConfig& c) {
  const StudySettings& s = c.study;
  Json j;
  j["name"] = c.name;
  j["domain"] = {{"exponent", c.exponent}};
  j["domain"]["shape"] = c.domain.is_null() ? domain_to_json(build_case(c).domain) : c.domain;
  Json grid = {{"kind", s.grid.kind},
               {"degree", s.grid.degree},
               {"box", Json::array({point_json(s.grid.box.lo), point_json(s.grid.box.hi)})},
               {"cells", Json::array({s.grid.cells[0], s.grid.cells[1]})},
               {"ratio", s.grid.ratio},
               {"toward", s.grid.toward_hi ? "hi" : "lo"}};
  if (s.grid.kind == "explicit") grid["breakpoints"] = {s.grid.breakpoints[0], s.grid.breakpoints[1]};
  j["grid"] = grid;
  Json problem = {{"type", to_string(c.problem.kind)}};
  if (!c.problem.case_name.empty()) problem["case"] = c.problem.case_name;
  switch (c.problem.kind) {
    case ProblemKind::Vcpe:
      if (c.problem.source) {
        problem["source"] = *c.problem.source;
        problem["coefficient"] = c.problem.coefficient;
      }
      break;
    case ProblemKind::PLaplace:
      problem["p"] = c.problem.p;
      if (c.problem.source) problem["source"] = *c.problem.source;
      break;
    case ProblemKind::QuasiNewtonian:
      problem["a0"] = c.problem.a0;
      problem["a_inf"] = c.problem.a_inf;
      problem["r_carreau"] = c.problem.r_carreau;
      problem["pressure"] = {{"degree", s.pressure.degree}, {"macro", s.pressure.macro}};
      if (c.problem.body_force) problem["body_force"] = point_json(*c.problem.body_force);
      break;
  }
  j["problem"] = problem;
  j["quadrature"] = {{"gauss", s.quadrature.gauss},
                     {"depth", s.quadrature.depth},
                     {"leaf", leaf_name(s.quadrature.leaf)}};
  const SolveOptions& o = s.solver;
  j["solver"] = {{"max_iterations", o.max_iterations},
                 {"linear_tolerance", o.linear_tolerance},
                 {"nonlinear_tolerance", o.nonlinear_tolerance},
                 {"max_newton", o.max_newton},
                 {"max_halvings", o.max_halvings},
                 {"eps_start", o.eps_start},
                 {"eps_final", o.eps_final},
                 {"p_step", o.p_step},
                 {"max_picard", o.max_picard},
                 {"picard_tolerance", o.picard_tolerance}};
  j["levels"] = s.levels;
  j["classification_samples"] = s.classification_samples;
  j["infsup"] = s.infsup;
  Json checks = Json::array();
  for (const auto& ch : c.checks) {
    Json cj = {{"kind", ch.kind}, {"quantity", ch.quantity}, {"bound", ch.bound}};
    if (ch.kind == "error_ratio") cj["reference"] = ch.reference;
    if (ch.kind == "eoc" || ch.kind == "diagnostic_eoc") cj["statistic"] = ch.statistic;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["output"] = {{"dir", c.output_dir}, {"dump_matrices", c.dump_matrices}};
  return j;
}

ManufacturedCase build_case(const RunConfig& c) {
  const ProblemSpec& p = c.problem;
  ManufacturedCase mc;
  if (!p.case_name.empty()) {
    CaseParams prm;
    prm.degree = c.study.grid.degree;
    prm.p = p.p;
    prm.a0 = p.a0;
    prm.a_inf = p.a_inf;
    prm.r_carreau = p.r_carreau;
    mc = manufactured_case(p.case_name, prm);
    if (mc.kind != p.kind)
      fail("problem.case", "case '" + p.case_name + "' belongs to problem type " +
                               to_string(mc.kind));
    if (!c.domain.is_null() && domain_to_json(domain_from_json(c.domain)) != domain_to_json(mc.domain))
      fail("domain.shape", "does not match the domain of case '" + p.case_name + "'");
  } else {
    mc.name = "custom";
    mc.kind = p.kind;
    mc.domain = domain_from_json(c.domain);
    mc.p = p.p;
    if (p.kind == ProblemKind::QuasiNewtonian) {
      const Point force = *p.body_force;
      mc.description = "constant body force";
      mc.phi = [force](const Point&) { return force; };
      mc.viscosity = carreau(p.a0, p.a_inf, p.r_carreau);
    } else {
      const double f = *p.source, a = p.coefficient;
      mc.description = "constant source";
      mc.f = [f](const Point&) { return f; };
      mc.a = [a](const Point&) { return a; };
    }
    mc.target_norm = "none";
    mc.regularity = "unknown";
  }
  mc.domain = mc.domain.with_exponent(c.exponent);
  return mc;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigurationError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::istringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object()) throw ConfigurationError("override '" + key + "': not an object");
    node = &(*node)[path[i]];
    if (node->is_null()) *node = Json::object();
  }
  if (!node->is_object()) throw ConfigurationError("override '" + key + "': not an object");
  (*node)[path.back()] = value;
}

}  // namespace webspline
