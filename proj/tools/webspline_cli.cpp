// Command-line driver: runs convergence studies from JSON configs.
//
//   webspline run <config> [--check] [--describe] [--threads N] [--dump-matrices]
//                          [--out DIR] [--set key=value ...]
//   webspline check <dir> [--threads N] [--out DIR] [--set key=value ...]
//   webspline cases
//
// Exit codes: 0 ok, 2 configuration error, 3 solver failure, 4 failed check.

#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "webspline/errors.hpp"
#include "webspline/runner.hpp"

namespace ws = webspline;

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kCheckError = 4;

ws::RunConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ws::ConfigurationError(path + ": cannot open config");
  ws::Json doc;
  try {
    doc = ws::Json::parse(in);
  } catch (const ws::Json::parse_error& e) {
    throw ws::ConfigurationError(path + ": " + e.what());
  }
  for (const auto& o : overrides) ws::apply_override(doc, o);
  try {
    return ws::parse_config(doc);
  } catch (const ws::ConfigurationError& e) {
    throw ws::ConfigurationError(path + ": " + e.what());
  }
}

// --out wins over the environment, which wins over the config.
std::string output_base(const std::string& out) {
  if (!out.empty()) return out;
  if (const char* env = std::getenv("WEBSPLINE_OUTPUT_DIR"); env && *env) return env;
  return {};
}

void config_error(const std::exception& e) { std::cerr << "error[config]: " << e.what() << "\n"; }

int run_one(const std::string& path, const std::vector<std::string>& overrides,
            const std::string& out, bool check, bool describe_only, bool dump) {
  ws::RunConfig cfg;
  try {
    cfg = load(path, overrides);
    if (dump) cfg.dump_matrices = true;
    if (const std::string base = output_base(out); !base.empty()) cfg.output_dir = base;
    if (describe_only) {
      std::cout << ws::describe_table(ws::describe(cfg));
      return 0;
    }
  } catch (const ws::ConfigurationError& e) {
    config_error(e);
    return kConfigError;
  }
  ws::RunResult res;
  try {
    res = ws::run_study(cfg);
  } catch (const ws::ConfigurationError& e) {
    config_error(e);
    return kConfigError;
  }
  ws::write_artifacts(res, cfg.output_dir);
  std::cout << ws::report_table(res);
  std::cout << "report written to " << cfg.output_dir << "\n";
  if (!res.solved()) {
    std::cerr << "error[solver]: " << res.report.failure << "\n";
    return kSolverError;
  }
  if (check && !res.passed()) {
    std::cerr << "error[check]: " << cfg.name << " violates an acceptance check\n";
    return kCheckError;
  }
  return 0;
}

int run_suite(const std::string& dir, const std::vector<std::string>& overrides,
              const std::string& out) {
  std::vector<ws::RunConfig> configs;
  try {
    for (const auto& path : ws::suite_configs(dir)) configs.push_back(load(path, overrides));
  } catch (const ws::ConfigurationError& e) {
    config_error(e);
    return kConfigError;
  }
  const std::string base = output_base(out);
  bool solver_failure = false, check_failure = false;
  std::vector<ws::RunResult> results;
  for (auto& cfg : configs) {
    if (!base.empty()) cfg.output_dir = (std::filesystem::path(base) / cfg.name).string();
    try {
      results.push_back(ws::run_study(cfg));
    } catch (const ws::ConfigurationError& e) {
      config_error(e);
      return kConfigError;
    }
    const auto& res = results.back();
    ws::write_artifacts(res, cfg.output_dir);
    std::cout << ws::report_table(res) << "\n";
    solver_failure |= !res.solved();
    check_failure |= !res.passed();
  }
  std::cout << "suite summary\n";
  for (const auto& res : results) {
    const char* status = !res.solved() ? "SOLVER FAILURE" : (res.passed() ? "ok" : "CHECK FAILED");
    std::cout << "  " << std::left << std::setw(28) << res.config.name << std::right
              << std::setw(16) << status << std::setw(10) << std::fixed << std::setprecision(1)
              << res.seconds << " s" << std::defaultfloat << "\n";
  }
  if (solver_failure) return kSolverError;
  if (check_failure) return kCheckError;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence studies with weighted extended B-splines"};
  app.require_subcommand(1);
  int threads = 0;
  std::string out;
  std::vector<std::string> overrides;
  app.add_option("--threads", threads, "Worker threads (default: OpenMP default)")
      ->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run one config");
  std::string config;
  bool check = false, describe_only = false, dump = false;
  run->add_option("config", config, "Config file")->required();
  run->add_flag("--check", check, "Exit 4 if an embedded check fails");
  run->add_flag("--describe", describe_only, "Print basis statistics without solving");
  run->add_flag("--dump-matrices", dump, "Write system matrices as triplets");
  run->add_option("--out", out, "Output directory (overrides WEBSPLINE_OUTPUT_DIR)");
  run->add_option("--set", overrides, "Override a config key, e.g. quadrature.depth=4");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* suite = app.add_subcommand("check", "Run every config of a directory with its checks");
  std::string dir;
  suite->add_option("dir", dir, "Directory of configs")->required();
  suite->add_option("--out", out, "Base output directory; one subdirectory per config");
  suite->add_option("--set", overrides, "Override a key in every config");
  suite->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* cases = app.add_subcommand("cases", "List the manufactured cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (*run) return run_one(config, overrides, out, check, describe_only, dump);
    if (*suite) return run_suite(dir, overrides, out);
    if (*cases) {
      for (const auto& n : ws::case_names()) std::cout << n << "\n";
      return 0;
    }
  } catch (const ws::SolverError& e) {
    std::cerr << "error[solver]: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
