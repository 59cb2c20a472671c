#include "webspline/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "webspline/errors.hpp"

namespace webspline {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> diagnostic_series(const ConvergenceReport& r, const std::string& name) {
  std::vector<double> out;
  for (const auto& lv : r.levels) {
    const auto it = lv.diagnostics.find(name);
    out.push_back(it == lv.diagnostics.end() ? kNaN : it->second);
  }
  return out;
}

std::vector<double> error_series(const ConvergenceReport& r, const std::string& name) {
  std::vector<double> out;
  for (const auto& lv : r.levels) {
    const auto it = lv.errors.find(name);
    out.push_back(it == lv.errors.end() ? kNaN : it->second);
  }
  return out;
}

double statistic(const std::vector<double>& v, const std::string& which) {
  if (v.empty()) return kNaN;
  if (which == "min") {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::isnan(x) ? kNaN : std::min(m, x);
    return m;
  }
  if (which == "last") return v.back();
  return median(v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

// NaN and infinities are not JSON numbers.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json num_list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

std::vector<CheckResult> evaluate_checks(const std::vector<CheckSpec>& checks,
                                         const ConvergenceReport& report) {
  std::vector<CheckResult> out;
  for (const auto& c : checks) {
    CheckResult r;
    r.bound = c.bound;
    r.value = kNaN;
    if (c.kind == "eoc" || c.kind == "diagnostic_eoc") {
      std::vector<double> rates;
      if (c.kind == "eoc") {
        const auto it = report.eoc.find(c.quantity);
        if (it != report.eoc.end()) rates = it->second;
      } else {
        const auto d = diagnostic_series(report, c.quantity);
        for (std::size_t k = 0; k + 1 < d.size(); ++k)
          rates.push_back(eoc(d[k], d[k + 1], report.levels[k].h, report.levels[k + 1].h));
      }
      r.value = statistic(rates, c.statistic);
      r.pass = rates.size() >= 2 && r.value >= c.bound;
      r.label = c.statistic + " eoc(" + c.quantity + ") >= " + fmt(c.bound);
    } else if (c.kind == "diagnostic_max") {
      const auto d = diagnostic_series(report, c.quantity);
      double m = d.empty() ? kNaN : 0.0;
      for (double x : d) m = std::isnan(x) ? kNaN : std::max(m, std::abs(x));
      r.value = m;
      r.pass = !d.empty() && m <= c.bound;
      r.label = "max |" + c.quantity + "| <= " + fmt(c.bound);
    } else if (c.kind == "diagnostic_ratio") {
      const auto d = diagnostic_series(report, c.quantity);
      if (!d.empty()) {
        const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
        r.value = *lo > 0.0 ? *lo / *hi : 0.0;
      }
      r.pass = d.size() >= 2 && r.value >= c.bound;
      r.label = "min/max " + c.quantity + " >= " + fmt(c.bound);
    } else if (c.kind == "error_ratio") {
      const auto e = error_series(report, c.quantity);
      const auto d = diagnostic_series(report, c.reference);
      double m = e.empty() ? kNaN : 0.0;
      for (std::size_t k = 0; k < e.size(); ++k) m = std::max(m, e[k] / d[k]);
      r.value = m;
      r.pass = !e.empty() && m <= c.bound;
      r.label = "max " + c.quantity + " / " + c.reference + " <= " + fmt(c.bound);
    }
    out.push_back(r);
  }
  return out;
}

bool RunResult::passed() const {
  if (!solved()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

RunResult run_study(const RunConfig& config) {
  RunResult res;
  res.config = config;
  const ManufacturedCase c = build_case(config);
  StudySettings s = config.study;
  if (config.dump_matrices) s.dump_dir = (std::filesystem::path(config.output_dir) / "matrices").string();
  const auto t0 = std::chrono::steady_clock::now();
  res.report = run_convergence(c, s);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.checks = evaluate_checks(config.checks, res.report);
  return res;
}

Json report_json(const RunResult& result) {
  const ConvergenceReport& r = result.report;
  const ManufacturedCase c = build_case(result.config);
  Json j;
  j["name"] = result.config.name;
  j["config"] = to_json(result.config);
  j["case"] = {{"name", r.case_name},
               {"problem", r.problem},
               {"description", c.description},
               {"regularity", r.regularity},
               {"target_order", num(r.target_order)},
               {"target_norm", r.target_norm}};
  Json levels = Json::array();
  Json level_seconds = Json::array();
  for (const auto& lv : r.levels) {
    Json l;
    l["level"] = lv.level;
    l["cells"] = {lv.cells[0], lv.cells[1]};
    l["h"] = lv.h;
    const BasisSummary& b = lv.basis;
    l["basis"] = {{"relevant", b.relevant},
                  {"inner", b.inner},
                  {"outer", b.outer},
                  {"interior_cells", b.interior_cells},
                  {"boundary_cells", b.boundary_cells},
                  {"exterior_cells", b.exterior_cells},
                  {"max_extension", b.max_extension},
                  {"min_alpha", b.min_alpha},
                  {"alpha_warning", b.alpha_warning}};
    l["errors"] = Json::object();
    for (const auto& [k, v] : lv.errors) l["errors"][k] = num(v);
    l["diagnostics"] = Json::object();
    for (const auto& [k, v] : lv.diagnostics) l["diagnostics"][k] = num(v);
    l["iterations"] = lv.iterations;
    l["history"] = num_list(lv.history);
    levels.push_back(l);
    level_seconds.push_back(lv.seconds);
  }
  j["levels"] = levels;
  j["eoc"] = Json::object();
  for (const auto& [k, v] : r.eoc) j["eoc"][k] = num_list(v);
  Json checks = Json::array();
  for (const auto& ch : result.checks)
    checks.push_back({{"check", ch.label}, {"value", num(ch.value)}, {"bound", ch.bound}, {"pass", ch.pass}});
  j["checks"] = checks;
  j["status"] = !result.solved() ? "solver_failure" : (result.passed() ? "ok" : "check_failure");
  j["failure"] = r.failure;
  j["timing"] = {{"total_seconds", result.seconds}, {"level_seconds", level_seconds}};
  return j;
}

Json strip_timing(Json report) {
  report.erase("timing");
  return report;
}

std::string report_table(const RunResult& result) {
  const ConvergenceReport& r = result.report;
  std::ostringstream os;
  os << result.config.name << ": " << r.case_name << " (" << r.problem << "), target order "
     << r.target_order << " in " << r.target_norm << "\n";
  std::vector<std::string> names;
  if (!r.levels.empty())
    for (const auto& [k, _] : r.levels.front().errors) names.push_back(k);
  os << std::setw(5) << "level" << std::setw(10) << "cells" << std::setw(11) << "h" << std::setw(8)
     << "dofs" << std::setw(7) << "iters";
  for (const auto& n : names) os << std::setw(12) << n << std::setw(7) << "eoc";
  os << "\n";
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    const auto& lv = r.levels[k];
    os << std::setw(5) << lv.level << std::setw(10)
       << (std::to_string(lv.cells[0]) + "x" + std::to_string(lv.cells[1])) << std::setw(11)
       << std::setprecision(4) << std::scientific << lv.h << std::setw(8) << lv.basis.inner
       << std::setw(7) << lv.iterations;
    for (const auto& n : names) {
      os << std::setw(12) << std::setprecision(3) << std::scientific << lv.errors.at(n);
      const auto it = r.eoc.find(n);
      if (k > 0 && it != r.eoc.end() && k - 1 < it->second.size())
        os << std::setw(7) << std::fixed << std::setprecision(2) << it->second[k - 1];
      else
        os << std::setw(7) << "-";
    }
    os << std::defaultfloat << "\n";
  }
  for (const auto& ch : result.checks)
    os << (ch.pass ? "  pass  " : "  FAIL  ") << ch.label << "  (value " << fmt(ch.value) << ")\n";
  if (!r.failure.empty()) os << "  solver failure: " << r.failure << "\n";
  return os.str();
}

std::string report_csv(const RunResult& result) {
  const ConvergenceReport& r = result.report;
  std::ostringstream os;
  os << std::setprecision(17) << "level,h,dofs,norm,error,eoc\n";
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    const auto& lv = r.levels[k];
    for (const auto& [name, e] : lv.errors) {
      os << lv.level << "," << lv.h << "," << lv.basis.inner << "," << name << "," << e << ",";
      const auto it = r.eoc.find(name);
      if (k > 0 && it != r.eoc.end() && k - 1 < it->second.size()) os << it->second[k - 1];
      os << "\n";
    }
  }
  return os.str();
}

void write_artifacts(const RunResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  auto write = [&](const char* file, const std::string& text) {
    std::ofstream os(base / file);
    if (!os) throw ConfigurationError("cannot write " + (base / file).string());
    os << text;
  };
  write("report.json", report_json(result).dump(2) + "\n");
  write("levels.csv", report_csv(result));
  write("summary.txt", report_table(result));
}

Json describe(const RunConfig& config) {
  const ManufacturedCase c = build_case(config);
  Json j;
  j["name"] = config.name;
  j["domain"] = c.domain.describe();
  Json levels = Json::array();
  for (int level = 0; level < config.study.levels; ++level) {
    const TensorGrid grid = make_grid(config.study.grid, level);
    const WebBasis basis(grid, c.domain, config.study.classification_samples);
    const BasisSummary b = basis.summary();
    levels.push_back({{"level", level},
                      {"cells", {grid.cells()[0], grid.cells()[1]}},
                      {"h", b.meshsize},
                      {"relevant", b.relevant},
                      {"inner", b.inner},
                      {"outer", b.outer},
                      {"interior_cells", b.interior_cells},
                      {"boundary_cells", b.boundary_cells},
                      {"exterior_cells", b.exterior_cells},
                      {"min_alpha", b.min_alpha},
                      {"alpha_warning", b.alpha_warning}});
  }
  j["levels"] = levels;
  return j;
}

std::string describe_table(const Json& d) {
  std::ostringstream os;
  os << d["name"].get<std::string>() << " on " << d["domain"].get<std::string>() << "\n";
  os << std::setw(5) << "level" << std::setw(10) << "cells" << std::setw(8) << "|K|" << std::setw(8)
     << "|I|" << std::setw(8) << "|J|" << std::setw(10) << "interior" << std::setw(10) << "boundary"
     << std::setw(10) << "min_alpha" << "\n";
  for (const auto& l : d["levels"]) {
    os << std::setw(5) << l["level"].get<int>() << std::setw(10)
       << (std::to_string(l["cells"][0].get<int>()) + "x" + std::to_string(l["cells"][1].get<int>()))
       << std::setw(8) << l["relevant"].get<int>() << std::setw(8) << l["inner"].get<int>()
       << std::setw(8) << l["outer"].get<int>() << std::setw(10) << l["interior_cells"].get<int>()
       << std::setw(10) << l["boundary_cells"].get<int>() << std::setw(10) << std::setprecision(3)
       << l["min_alpha"].get<double>() << (l["alpha_warning"].get<bool>() ? "  (small alpha)" : "")
       << "\n";
  }
  return os.str();
}

std::vector<std::string> suite_configs(const std::string& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigurationError(dir + ": not a directory");
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigurationError(dir + ": no *.json configs to run");
  return files;
}

}  // namespace webspline
