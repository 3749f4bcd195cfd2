#include "pdcv/learners.hpp"

namespace pdcv {

void epsilon_greedy_row(std::span<const double> q_values, double epsilon, std::span<double> out) {
  if (q_values.empty()) throw std::invalid_argument("epsilon_greedy_row: no actions");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon_greedy_row: epsilon outside [0,1]");
  if (out.size() != q_values.size()) throw std::invalid_argument("epsilon_greedy_row: size mismatch");
  std::size_t greedy = 0;
  for (std::size_t a = 1; a < q_values.size(); ++a) {
    if (q_values[a] > q_values[greedy]) greedy = a;
  }
  const double explore = epsilon / static_cast<double>(q_values.size());
  std::fill(out.begin(), out.end(), explore);
  out[greedy] = 1.0 - epsilon + explore;
}

std::vector<double> epsilon_greedy_row(std::span<const double> q_values, double epsilon) {
  std::vector<double> row(q_values.size());
  epsilon_greedy_row(q_values, epsilon, row);
  return row;
}

void LearnerConfig::validate() const {
  estimator.validate();
  if (estimator.variant == Variant::StateCv) {
    throw std::invalid_argument("LearnerConfig: state_cv targets state values; learners update action values");
  }
  if (!(step_size > 0.0 && step_size <= 1.0)) throw std::invalid_argument("LearnerConfig: step_size outside (0,1]");
  if (episode_cap < 1) throw std::invalid_argument("LearnerConfig: episode_cap must be >= 1");
  if (!(divergence_threshold > 0.0)) throw std::invalid_argument("LearnerConfig: divergence_threshold must be positive");
  if (mode == LearnerMode::Prediction) {
    if (!behaviour || !target) throw std::invalid_argument("LearnerConfig: prediction needs behaviour and target policies");
    check_support(*behaviour, *target);
  } else if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("LearnerConfig: epsilon outside [0,1]");
  }
}

}  // namespace pdcv
