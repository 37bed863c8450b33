#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "plap/scenario.hpp"

namespace fs = std::filesystem;

namespace {

void summarize(const plap::RunResult& r) {
  std::cout << r.name << ": exit " << r.exit_code << ": " << r.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub/super-solution solver for Dirichlet p-Laplacian problems"};
  app.require_subcommand(1);
  // --h is the grid spacing, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.fallthrough();

  std::optional<double> h, tol;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  app.add_option("--h", h, "Grid spacing; overrides the scenario's cell count")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "Fixed-point tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Artifact directory (empty string disables output)");
  app.add_option("--seed", seed, "Seed for the randomized probe starts");

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run the full pipeline of one scenario");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();

  auto* thresholds = app.add_subcommand("thresholds", "Print constants and thresholds of one scenario");
  thresholds->add_option("scenario", scenario_path, "Scenario JSON")->required();

  std::string dir;
  auto* sweep = app.add_subcommand("sweep", "Run every scenario in a directory concurrently");
  sweep->add_option("dir", dir, "Directory of scenario JSON files")->required()->check(CLI::ExistingDirectory);

  for (auto* sub : {run, thresholds, sweep}) sub->set_help_flag("--help", "Print this help message and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : plap::exit_config;
  }

  plap::RunOptions options;
  options.h = h;
  options.tol = tol;
  options.seed = seed;
  options.out = out;

  if (*run) {
    const plap::RunResult r = plap::run_scenario_file(scenario_path, options);
    summarize(r);
    return r.exit_code;
  }
  if (*thresholds) {
    plap::RunResult r;
    try {
      r = plap::scenario_thresholds(plap::load_scenario(scenario_path), options);
    } catch (const plap::ConfigError& e) {
      std::cerr << scenario_path << ": " << e.what() << '\n';
      return plap::exit_config;
    }
    std::cout << plap::dump_json(r.report) << '\n';
    return r.exit_code;
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::future<plap::RunResult>> jobs;
  for (const auto& f : files)
    jobs.push_back(std::async(std::launch::async, [f, options] { return plap::run_scenario_file(f, options); }));
  int worst = plap::exit_ok;
  for (auto& job : jobs) {
    const plap::RunResult r = job.get();
    summarize(r);
    worst = std::max(worst, r.exit_code);
  }
  return worst;
}
