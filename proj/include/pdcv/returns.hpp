#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdcv/mdp.hpp"

namespace pdcv {

enum class Variant { SarsaIs, ExpectedSarsa, CvSarsa, TreeBackup, StateCv };

std::string_view to_string(Variant v);
/// Accepts the names printed by to_string. Throws std::invalid_argument.
Variant parse_variant(std::string_view name);

/// Which n-step return to compute, and with what parameters.
struct ReturnEstimatorSpec {
  Variant variant = Variant::CvSarsa;
  std::size_t n = 1;
  double gamma = 1.0;
  /// Coefficient on (rho * Q - E_pi[Q]); -1 gives CV Sarsa, 0 gives plain
  /// per-decision importance sampling. Only read by Variant::CvSarsa.
  double cv_coefficient = -1.0;

  void validate() const;
};

/// Quantities at one time step k of a trajectory, read off a frozen value
/// function. `reward` is the reward that followed (S_k, A_k).
struct StepSample {
  double reward = 0.0;      // R_{k+1}
  double rho = 1.0;         // pi(S_k, A_k) / mu(S_k, A_k)
  double pi = 1.0;          // pi(S_k, A_k)
  double q = 0.0;           // Q(S_k, A_k)
  double expected_q = 0.0;  // E_pi[Q(S_k, .)]
  double v = 0.0;           // V(S_k), state-value form only
};

/// Window of a trajectory starting at time t. `steps` holds times t..t+m-1.
/// `bootstrap` holds time t+m, or is empty when S_{t+m} is terminal; its
/// reward field is ignored. A terminal successor has every value equal to 0.
struct ReturnContext {
  std::span<const StepSample> steps;
  std::optional<StepSample> bootstrap;
  double gamma = 1.0;
};

/// G = R + gamma * rho' * G', bottoming out at Q of the bootstrap pair.
double nstep_sarsa_is_return(const ReturnContext& ctx);

/// Discounted reward sum plus gamma^n E_pi[Q] at the end of the window.
/// Importance ratios are not applied to the sampled rewards.
double nstep_expected_sarsa_return(const ReturnContext& ctx);

/// G = R + gamma * (rho' * G' + c * (rho' * Q' - E_pi[Q'])).
double nstep_cv_sarsa_return(const ReturnContext& ctx, double cv_coefficient = -1.0);

/// G = R + gamma * (pi' * G' + E_pi[Q'] - pi' * Q').
double nstep_tree_backup_return(const ReturnContext& ctx);

/// Time step with the full target row and action-value row, for the form of
/// Tree-backup that sums over the actions not taken.
struct ActionRowStep {
  double reward = 0.0;
  ActionId action = 0;
  std::span<const double> pi;
  std::span<const double> q;
};

/// G = R + gamma * (pi' * G' + sum_{a != A'} pi(a) Q(a)).
double nstep_tree_backup_return_sum_form(std::span<const ActionRowStep> steps,
                                         const std::optional<ActionRowStep>& bootstrap,
                                         double gamma);

/// G = rho * (R + gamma * G') + (1 - rho) * V, bottoming out at V.
double nstep_state_cv_return(const ReturnContext& ctx);

/// Dispatch on spec.variant. The window length is taken from ctx, not spec.n.
double nstep_return(const ReturnEstimatorSpec& spec, const ReturnContext& ctx);

/// Builds the context for G_{t:t+n} over a recorded sequence of samples where
/// `terminal` says whether the sequence ends in a terminal state.
ReturnContext window(std::span<const StepSample> samples, bool terminal, std::size_t t,
                     std::size_t n, double gamma);

/// A whole recorded episode evaluated under a frozen value function.
struct FrozenEpisode {
  std::vector<StepSample> steps;
  bool terminal = true;
};

/// (1 - lambda) sum_{n=1}^{T-t-1} lambda^{n-1} G_{t:t+n} + lambda^{T-t-1} G_{t:T},
/// with G taken from `variant` (its n is ignored). Throws std::logic_error for a
/// non-terminal episode.
double lambda_return_weighted(const FrozenEpisode& episode, std::size_t t,
                              const ReturnEstimatorSpec& variant, double lambda);

enum class TdErrorForm { Sarsa, CvSarsa, TreeBackup, StateValue };

/// The lambda-return written as a decayed sum of one-step TD errors:
///   Sarsa:      Sarsa errors, decay gamma * lambda * rho
///   CvSarsa:    Expected Sarsa errors, decay gamma * lambda * rho
///   TreeBackup: Expected Sarsa errors, decay gamma * lambda * pi
///   StateValue: state TD errors scaled by rho_t, decay gamma * lambda * rho
double lambda_return_tderror_sum(const FrozenEpisode& episode, std::size_t t, double gamma,
                                 double lambda, TdErrorForm form);

}  // namespace pdcv
