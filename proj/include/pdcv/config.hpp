#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdcv/returns.hpp"

namespace pdcv {

enum class Experiment { GridworldOffpolicy, GridworldOnpolicy, MountainCar };
enum class Measurement { RmsAfterFinalEpisode, ReturnPerEpisode };

std::string_view to_string(Experiment e);
std::string_view to_string(Measurement m);
Experiment parse_experiment(std::string_view name);
Measurement parse_measurement(std::string_view name);

/// Raised for malformed or invalid configuration text. The message names the
/// offending key or the line of a syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmSpec {
  Variant variant = Variant::CvSarsa;
  std::size_t n = 1;
  double cv_coefficient = -1.0;

  /// Variant name, with the coefficient appended when it is not -1.
  std::string label() const;
  bool operator==(const AlgorithmSpec&) const = default;
};

std::vector<double> default_alpha_grid();

struct ExperimentConfig {
  Experiment experiment = Experiment::GridworldOffpolicy;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<double> alpha_grid;
  std::size_t episodes = 200;
  std::size_t runs = 1000;
  std::uint64_t base_seed = 0;
  Measurement measurement = Measurement::RmsAfterFinalEpisode;
  double divergence_sentinel = 1e6;

  /// Published protocol for each experiment: algorithms, default alpha grid,
  /// episode and run counts, and measurement.
  static ExperimentConfig defaults(Experiment e);

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses JSON text. `experiment`, `algorithms` and `alpha_grid` are
/// required; other keys default per experiment. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config.
std::string dump_config(const ExperimentConfig& config);

}  // namespace pdcv
