#include "pdcv/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <tuple>

#include "pdcv/environments.hpp"
#include "pdcv/learners.hpp"
#include "pdcv/oracle.hpp"

namespace pdcv {

namespace {

constexpr double kTargetEpsilon = 0.5;
constexpr double kControlEpsilon = 0.1;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Read-only state shared by every run of a sweep.
struct SweepShared {
  GridWorld grid;
  std::shared_ptr<const DiscretePolicy> behaviour;
  std::shared_ptr<const DiscretePolicy> target;
  std::optional<ExactQTable> truth;
  TileCoder coder{TileCoderConfig::mountain_car()};

  explicit SweepShared(const ExperimentConfig& config) {
    if (config.experiment == Experiment::MountainCar) return;
    behaviour = std::make_shared<const DiscretePolicy>(
        DiscretePolicy::uniform(grid.state_count(), GridWorld::kActions));
    target = config.experiment == Experiment::GridworldOffpolicy
                 ? std::make_shared<const DiscretePolicy>(gridworld_north_policy(grid, kTargetEpsilon))
                 : behaviour;
    truth = exact_q(gridworld_model(grid), *target);
  }
};

RunRecord run_cell(const ExperimentConfig& config, const SweepShared& shared,
                   const AlgorithmSpec& algorithm, double alpha, std::size_t run) {
  RunRecord rec;
  rec.algorithm = algorithm.label();
  rec.n = algorithm.n;
  rec.alpha = alpha;
  rec.run = run;
  rec.seed = derive_seed(config.base_seed, cell_key(algorithm, alpha), run);

  LearnerConfig lc;
  lc.estimator = {algorithm.variant, algorithm.n, 1.0, algorithm.cv_coefficient};
  lc.step_size = alpha;
  lc.divergence_threshold = config.divergence_sentinel;

  if (config.experiment == Experiment::MountainCar) {
    lc.mode = LearnerMode::Control;
    lc.epsilon = kControlEpsilon;
    lc.episode_cap = MountainCar::kDefaultStepCap;
    lc.validate();
    MountainCar env;
    RunState<LinearQ<MountainCarState>> state(
        LinearQ<MountainCarState>(shared.coder, MountainCar::kActions), rec.seed);
    const double sentinel = -static_cast<double>(lc.episode_cap);
    for (std::size_t e = 0; e < config.episodes; ++e) {
      const auto m = run_control_episode(state, env, lc);
      rec.series.push_back(m.diverged ? sentinel : m.episode_return);
    }
    rec.diverged = state.diverged;
    double sum = 0.0;
    for (double r : rec.series) sum += r;
    rec.final_metric = sum / static_cast<double>(rec.series.size());
    return rec;
  }

  lc.mode = LearnerMode::Prediction;
  lc.behaviour = shared.behaviour;
  lc.target = shared.target;
  lc.episode_cap = GridWorld::kDefaultStepCap;
  lc.validate();
  GridWorld env = shared.grid;
  RunState<TabularQ> state(TabularQ(env.state_count(), GridWorld::kActions), rec.seed);
  for (std::size_t e = 0; e < config.episodes && !state.diverged; ++e) {
    run_prediction_episode(state, env, lc);
  }
  const auto rms = rms_error(state.values, *shared.truth, config.divergence_sentinel);
  rec.diverged = state.diverged || rms.diverged;
  rec.final_metric = rec.diverged ? config.divergence_sentinel : rms.value;
  return rec;
}

struct Job {
  std::size_t algorithm;
  std::size_t alpha;
  std::size_t run;
};

std::vector<Job> jobs_of(const ExperimentConfig& config) {
  std::vector<Job> jobs;
  jobs.reserve(config.algorithms.size() * config.alpha_grid.size() * config.runs);
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    for (std::size_t s = 0; s < config.alpha_grid.size(); ++s) {
      for (std::size_t r = 0; r < config.runs; ++r) jobs.push_back({a, s, r});
    }
  }
  return jobs;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

using CellId = std::tuple<std::string, std::size_t, double>;

// Records grouped per cell, each group sorted by run index.
std::map<CellId, std::vector<const RunRecord*>> group(const std::vector<RunRecord>& records) {
  std::map<CellId, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) groups[{r.algorithm, r.n, r.alpha}].push_back(&r);
  for (auto& [_, g] : groups) {
    std::sort(g.begin(), g.end(), [](const RunRecord* a, const RunRecord* b) {
      return std::tie(a->run, a->seed) < std::tie(b->run, b->seed);
    });
  }
  return groups;
}

}  // namespace

std::uint64_t cell_key(const AlgorithmSpec& algorithm, double alpha) {
  std::uint64_t k = mix64(fnv1a(algorithm.label()));
  k = mix64(k ^ static_cast<std::uint64_t>(algorithm.n));
  return mix64(k ^ std::bit_cast<std::uint64_t>(alpha));
}

RunRecord run_single(const ExperimentConfig& config, const AlgorithmSpec& algorithm, double alpha,
                     std::size_t run) {
  config.validate();
  const SweepShared shared(config);
  return run_cell(config, shared, algorithm, alpha, run);
}

std::vector<RunRecord> run_sweep_serial(const ExperimentConfig& config) {
  config.validate();
  const SweepShared shared(config);
  std::vector<RunRecord> records;
  for (const auto& job : jobs_of(config)) {
    records.push_back(run_cell(config, shared, config.algorithms[job.algorithm],
                               config.alpha_grid[job.alpha], job.run));
  }
  return records;
}

std::vector<RunRecord> run_sweep(const ExperimentConfig& config, int workers) {
  config.validate();
  if (workers < 1) throw std::invalid_argument("run_sweep: workers must be >= 1");
  const SweepShared shared(config);
  const auto jobs = jobs_of(config);
  std::vector<RunRecord> records(jobs.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(jobs.size());

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t j = 0; j < count; ++j) {
    try {
      const Job& job = jobs[static_cast<std::size_t>(j)];
      records[static_cast<std::size_t>(j)] =
          run_cell(config, shared, config.algorithms[job.algorithm], config.alpha_grid[job.alpha], job.run);
    } catch (...) {
#pragma omp critical(pdcv_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                    const std::string& episode_label) {
  std::vector<AggregateRow> rows;
  for (const auto& [cell, g] : group(records)) {
    std::vector<double> xs;
    std::size_t diverged = 0;
    for (const RunRecord* r : g) {
      xs.push_back(r->final_metric);
      diverged += r->diverged ? 1 : 0;
    }
    AggregateRow row{std::get<0>(cell), std::get<1>(cell), std::get<2>(cell), episode_label};
    row.mean = mean_of(xs);
    row.stddev = sample_std(xs, row.mean);
    row.std_error = row.stddev / std::sqrt(static_cast<double>(xs.size()));
    row.runs = xs.size();
    row.diverged = diverged;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CurveRow> aggregate_curves(const std::vector<RunRecord>& records) {
  std::vector<CurveRow> rows;
  for (const auto& [cell, g] : group(records)) {
    std::size_t episodes = 0;
    for (const RunRecord* r : g) episodes = std::max(episodes, r->series.size());
    for (std::size_t e = 0; e < episodes; ++e) {
      std::vector<double> xs;
      for (const RunRecord* r : g) {
        if (e < r->series.size()) xs.push_back(r->series[e]);
      }
      CurveRow row{std::get<0>(cell), std::get<1>(cell), std::get<2>(cell), e + 1};
      row.mean_return = mean_of(xs);
      row.std_error = sample_std(xs, row.mean_return) / std::sqrt(static_cast<double>(xs.size()));
      row.runs = xs.size();
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<AggregateRow> best_settings(const std::vector<AggregateRow>& rows, bool maximize) {
  std::map<std::pair<std::string, std::size_t>, AggregateRow> best;
  for (const auto& r : rows) {
    auto [it, inserted] = best.try_emplace({r.algorithm, r.n}, r);
    if (inserted) continue;
    const bool better = maximize ? r.mean > it->second.mean : r.mean < it->second.mean;
    if (better) it->second = r;
  }
  std::vector<AggregateRow> out;
  for (auto& [_, r] : best) out.push_back(r);
  return out;
}

}  // namespace pdcv
