#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "webspline/errors.hpp"
#include "webspline/runner.hpp"

namespace ws = webspline;
namespace fs = std::filesystem;
using ws::Json;
using ws::Point;

namespace {

Json base_doc() {
  return Json::parse(R"({
    "name": "t",
    "grid": {"degree": 2, "cells": [4, 4]},
    "problem": {"type": "vcpe", "case": "disk_poisson"},
    "quadrature": {"gauss": 3, "depth": 4},
    "levels": 3
  })");
}

std::string config_error(const Json& doc) {
  try {
    ws::parse_config(doc);
  } catch (const ws::ConfigurationError& e) {
    return e.what();
  }
  return "";
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("webspline_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Config, DefaultsAndRoundTrip) {
  const auto cfg = ws::parse_config(base_doc());
  EXPECT_EQ(cfg.output_dir, "results/t");
  EXPECT_EQ(cfg.study.levels, 3);
  const Json eff = ws::to_json(cfg);
  EXPECT_EQ(ws::to_json(ws::parse_config(eff)), eff);
  for (const auto& name : ws::suite_configs(WEBSPLINE_CONFIG_DIR)) {
    const Json doc = ws::to_json(ws::load_config(name));
    EXPECT_EQ(ws::to_json(ws::parse_config(doc)), doc) << name;
  }
}

TEST(Config, RejectsUnknownKeysWithPath) {
  Json doc = base_doc();
  doc["problem"]["viscosity"] = 3;
  EXPECT_NE(config_error(doc).find("problem.viscosity"), std::string::npos);
  doc = base_doc();
  doc["colour"] = "red";
  EXPECT_NE(config_error(doc).find("colour"), std::string::npos);
}

TEST(Config, RejectsInadmissibleValues) {
  Json doc = base_doc();
  doc["problem"] = {{"type", "plap"}, {"case", "plap_smooth"}, {"p", 0.5}};
  EXPECT_NE(config_error(doc).find("p = 0.5 is not admissible"), std::string::npos);
  doc = base_doc();
  doc["grid"] = {{"kind", "explicit"}, {"degree", 2}, {"breakpoints", {{-1, 0.5, 0, 1}, {-1, 0, 1}}}};
  EXPECT_FALSE(config_error(doc).empty());
  doc = base_doc();
  doc["levels"] = 2;
  EXPECT_NE(config_error(doc).find("levels"), std::string::npos);
  doc = base_doc();
  doc["quadrature"]["gauss"] = "three";
  EXPECT_NE(config_error(doc).find("quadrature.gauss"), std::string::npos);
  doc = base_doc();
  doc["problem"]["source"] = 1.0;
  EXPECT_FALSE(config_error(doc).empty());
}

TEST(Config, DomainTreeRoundTrip) {
  const Json tree = Json::parse(R"({"and": [{"box": {"lo": [-1, -0.5], "hi": [1, 0.5]}},
                                           {"not": {"disk": {"center": [0.2, 0], "radius": 0.3}}}]})");
  const auto d = ws::domain_from_json(tree, 2.0);
  EXPECT_EQ(d.exponent(), 2.0);
  EXPECT_TRUE(d.inside(Point(0.8, 0)));
  EXPECT_FALSE(d.inside(Point(0.2, 0)));
  const auto back = ws::domain_from_json(ws::domain_to_json(d));
  for (const Point& x : {Point(0.8, 0.1), Point(0.1, 0.2), Point(-0.7, -0.4)})
    EXPECT_DOUBLE_EQ(back.level(x), d.level(x));
  EXPECT_THROW(ws::domain_from_json(Json::parse(R"({"triangle": {}})")), ws::ConfigurationError);
}

TEST(Config, Overrides) {
  Json doc = base_doc();
  ws::apply_override(doc, "quadrature.depth=2");
  ws::apply_override(doc, "grid.kind=graded");
  ws::apply_override(doc, "output.dir=/tmp/x");
  EXPECT_EQ(doc["quadrature"]["depth"], 2);
  EXPECT_EQ(doc["grid"]["kind"], "graded");
  const auto cfg = ws::parse_config(doc);
  EXPECT_EQ(cfg.study.quadrature.depth, 2);
  EXPECT_EQ(cfg.output_dir, "/tmp/x");
  EXPECT_THROW(ws::apply_override(doc, "no_equals_sign"), ws::ConfigurationError);
}

TEST(Checks, Evaluation) {
  ws::ConvergenceReport r;
  r.eoc["h1"] = {1.9, 2.1, 1.2};
  for (double d : {1e-12, 3e-12, 1e-13}) {
    ws::LevelRecord rec;
    rec.diagnostics["max_divergence"] = d;
    rec.errors["h1"] = 1.0;
    rec.diagnostics["proj"] = 0.5;
    r.levels.push_back(rec);
  }
  const auto res = ws::evaluate_checks({{"eoc", "h1", "", "median", 1.8},
                                        {"eoc", "h1", "", "min", 1.8},
                                        {"eoc", "h1", "", "last", 1.0},
                                        {"diagnostic_max", "max_divergence", "", "median", 1e-11},
                                        {"error_ratio", "h1", "proj", "median", 1.5}},
                                       r);
  ASSERT_EQ(res.size(), 5u);
  EXPECT_TRUE(res[0].pass);
  EXPECT_NEAR(res[0].value, 1.9, 1e-15);
  EXPECT_FALSE(res[1].pass);
  EXPECT_TRUE(res[2].pass);
  EXPECT_TRUE(res[3].pass);
  EXPECT_FALSE(res[4].pass);
  EXPECT_NEAR(res[4].value, 2.0, 1e-15);
}

TEST(Runner, CustomSourceStudyAndArtifacts) {
  Json doc = Json::parse(R"({
    "name": "custom",
    "domain": {"shape": {"disk": {"center": [0, 0], "radius": 0.8}}},
    "grid": {"degree": 2, "cells": [4, 4]},
    "problem": {"type": "vcpe", "source": 1.0},
    "quadrature": {"gauss": 3, "depth": 3},
    "levels": 3
  })");
  const auto cfg = ws::parse_config(doc);
  const auto res = ws::run_study(cfg);
  ASSERT_TRUE(res.solved()) << res.report.failure;
  // -Δu = 1 on a disk of radius R has u = (R^2 - r^2)/4, ||u||_L2 = sqrt(pi/3) R^3 / 4.
  const double exact = std::sqrt(M_PI / 3) * std::pow(0.8, 3) / 4;
  EXPECT_NEAR(res.report.levels.back().diagnostics.at("solution_l2"), exact, 1e-4);

  const Json rep = ws::report_json(res);
  EXPECT_EQ(rep["status"], "ok");
  EXPECT_TRUE(rep.contains("timing"));
  EXPECT_FALSE(ws::strip_timing(rep).contains("timing"));
  EXPECT_EQ(rep["levels"].size(), 3u);

  const fs::path dir = temp_dir("artifacts");
  ws::write_artifacts(res, dir.string());
  for (const char* f : {"report.json", "levels.csv", "summary.txt"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream in(dir / "report.json");
  EXPECT_EQ(ws::strip_timing(Json::parse(in)), ws::strip_timing(rep));
  std::ifstream csv(dir / "levels.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "level,h,dofs,norm,error,eoc");
}

TEST(Runner, DescribeWithoutSolving) {
  const auto cfg = ws::parse_config(base_doc());
  const Json d = ws::describe(cfg);
  ASSERT_EQ(d["levels"].size(), 3u);
  EXPECT_NE(ws::describe_table(d).find("|I|"), std::string::npos);
}

TEST(Runner, SuiteDiscovery) {
  const fs::path empty = temp_dir("empty");
  EXPECT_THROW(ws::suite_configs(empty.string()), ws::ConfigurationError);
  EXPECT_THROW(ws::suite_configs((empty / "missing").string()), ws::ConfigurationError);
  const auto files = ws::suite_configs(WEBSPLINE_CONFIG_DIR);
  EXPECT_EQ(files.size(), 8u);
  EXPECT_TRUE(std::is_sorted(files.begin(), files.end()));
}
