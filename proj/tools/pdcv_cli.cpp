// Command-line front end: exact grid-world values, single-cell runs and
// full parameter sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pdcv/environments.hpp"
#include "pdcv/harness.hpp"
#include "pdcv/oracle.hpp"

namespace {

using namespace pdcv;

struct Options {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::size_t> runs;
  std::string policy = "equiprobable";
  std::string variant;
  std::size_t n = 0;
  double alpha = 0.0;
};

ExperimentConfig resolve_config(const Options& opt) {
  if (opt.config_path.empty()) throw std::runtime_error("--config is required");
  ExperimentConfig config = load_config(opt.config_path);
  if (opt.seed) config.base_seed = *opt.seed;
  if (opt.runs) config.runs = *opt.runs;
  config.validate();
  return config;
}

int cmd_truth(const Options& opt) {
  const GridWorld grid;
  DiscretePolicy policy = DiscretePolicy::uniform(grid.state_count(), GridWorld::kActions);
  if (opt.policy == "north") {
    policy = gridworld_north_policy(grid, 0.5);
  } else if (opt.policy != "equiprobable") {
    throw std::runtime_error("unknown --policy '" + opt.policy + "'");
  }
  const auto truth = exact_q(gridworld_model(grid), policy);
  std::fprintf(stderr, "exact_q: %zu sweeps, residual %.3g\n", truth.sweeps, truth.residual);
  if (opt.out_path.empty()) {
    write_truth_csv(std::cout, truth);
  } else {
    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
    write_truth_csv(out, truth);
  }
  return 0;
}

int cmd_run(const Options& opt) {
  const ExperimentConfig config = resolve_config(opt);
  AlgorithmSpec algorithm = config.algorithms.front();
  if (!opt.variant.empty()) algorithm.variant = parse_variant(opt.variant);
  if (opt.n > 0) algorithm.n = opt.n;
  const double alpha = opt.alpha > 0.0 ? opt.alpha : config.alpha_grid.front();

  std::vector<RunRecord> records;
  std::printf("%s n=%zu alpha=%g on %s\n", algorithm.label().c_str(), algorithm.n, alpha,
              std::string(to_string(config.experiment)).c_str());
  for (std::size_t r = 0; r < config.runs; ++r) {
    records.push_back(run_single(config, algorithm, alpha, r));
    const auto& rec = records.back();
    std::printf("run %zu seed %llu metric %.6g%s\n", r, static_cast<unsigned long long>(rec.seed),
                rec.final_metric, rec.diverged ? " (diverged)" : "");
  }
  const auto rows = aggregate(records, config.measurement == Measurement::ReturnPerEpisode ? "all" : "final");
  emit_csv(std::cout, rows);
  if (!opt.out_path.empty()) emit_csv(rows, opt.out_path);
  return 0;
}

int cmd_sweep(const Options& opt) {
  const ExperimentConfig config = resolve_config(opt);
  if (opt.out_path.empty()) throw std::runtime_error("--out is required for sweep");
  const auto records = run_sweep(config, opt.workers);
  if (config.measurement == Measurement::ReturnPerEpisode) {
    emit_csv(aggregate(records, "all"), opt.out_path);
    std::filesystem::path curves(opt.out_path);
    curves.replace_filename(curves.stem().string() + "_curves.csv");
    emit_curves_csv(aggregate_curves(records), curves);
    std::fprintf(stderr, "wrote %s and %s\n", opt.out_path.c_str(), curves.string().c_str());
  } else {
    emit_csv(aggregate(records), opt.out_path);
    std::fprintf(stderr, "wrote %s\n", opt.out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-decision control variate n-step TD experiments"};
  app.require_subcommand(1);
  Options opt;

  auto* truth = app.add_subcommand("truth", "Write the exact grid-world action values as CSV");
  truth->add_option("--out", opt.out_path, "Output CSV (stdout when omitted)");
  truth->add_option("--policy", opt.policy, "equiprobable or north (epsilon 0.5)")
      ->check(CLI::IsMember({"equiprobable", "north"}));

  auto* run = app.add_subcommand("run", "Run a single sweep cell and print every run");
  run->add_option("--config", opt.config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", opt.out_path, "Aggregate CSV for the cell");
  run->add_option("--seed", opt.seed, "Override base_seed");
  run->add_option("--runs", opt.runs, "Override run count");
  run->add_option("--variant", opt.variant, "Estimator variant (default: first in config)");
  run->add_option("--n", opt.n, "Number of steps (default: first in config)");
  run->add_option("--alpha", opt.alpha, "Step size (default: first in alpha_grid)");

  auto* sweep = app.add_subcommand("sweep", "Run the full parameter grid of a config");
  sweep->add_option("--config", opt.config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", opt.out_path, "Aggregate CSV path")->required();
  sweep->add_option("--seed", opt.seed, "Override base_seed");
  sweep->add_option("--workers", opt.workers, "OpenMP worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--runs", opt.runs, "Override run count");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*truth) return cmd_truth(opt);
    if (*run) return cmd_run(opt);
    return cmd_sweep(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
