#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdcv/config.hpp"

namespace pdcv {

/// Outcome of one learning run in one sweep cell.
struct RunRecord {
  std::string algorithm;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  /// Per-episode returns (return_per_episode); empty for RMS measurements.
  std::vector<double> series;
  /// Final RMS, or the mean of `series`. Clamped to the sentinel on divergence.
  double final_metric = 0.0;
  bool diverged = false;

  bool operator==(const RunRecord&) const = default;
};

/// Key mixed into per-run seeds. Depends only on the cell's own algorithm
/// and step size, so growing a grid leaves existing cells' streams intact.
std::uint64_t cell_key(const AlgorithmSpec& algorithm, double alpha);

/// Runs one (algorithm, alpha, run) cell of `config`.
RunRecord run_single(const ExperimentConfig& config, const AlgorithmSpec& algorithm, double alpha,
                     std::size_t run);

/// Every (algorithm, alpha, run) of the config, in algorithm-major,
/// alpha, run order. Runs are spread over `workers` OpenMP threads; the
/// result does not depend on the worker count.
std::vector<RunRecord> run_sweep(const ExperimentConfig& config, int workers);

/// Single-threaded reference for run_sweep.
std::vector<RunRecord> run_sweep_serial(const ExperimentConfig& config);

struct AggregateRow {
  std::string algorithm;
  std::size_t n = 0;
  double alpha = 0.0;
  std::string episode;  // "final" for RMS, "all" for mean return over episodes
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double std_error = 0.0;
  std::size_t runs = 0;
  std::size_t diverged = 0;

  bool operator==(const AggregateRow&) const = default;
};

struct CurveRow {
  std::string algorithm;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t episode = 0;  // 1-based
  double mean_return = 0.0;
  double std_error = 0.0;
  std::size_t runs = 0;

  bool operator==(const CurveRow&) const = default;
};

/// Mean, sample deviation and standard error of the records' final metric
/// per (algorithm, n, alpha). Input order does not matter.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                    const std::string& episode_label = "final");

/// Per-episode learning curves from the records' series.
std::vector<CurveRow> aggregate_curves(const std::vector<RunRecord>& records);

/// Best row per (algorithm, n): lowest mean when minimizing (RMS), highest
/// when maximizing (return).
std::vector<AggregateRow> best_settings(const std::vector<AggregateRow>& rows, bool maximize);

/// Header: algorithm,n,alpha,episode,mean,std,stderr,runs,diverged
void emit_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);
std::vector<AggregateRow> parse_csv(std::istream& in);

/// Header: algorithm,n,alpha,episode,mean_return,stderr,runs
void emit_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows);
void emit_curves_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path);

}  // namespace pdcv
