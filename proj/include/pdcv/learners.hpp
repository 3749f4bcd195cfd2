#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdcv/function_approx.hpp"
#include "pdcv/mdp.hpp"
#include "pdcv/returns.hpp"
#include "pdcv/rng.hpp"

namespace pdcv {

/// Greedy action gets 1 - epsilon + epsilon / |A|, the rest epsilon / |A|.
/// Ties go to the lowest index. Throws std::invalid_argument on an empty row.
void epsilon_greedy_row(std::span<const double> q_values, double epsilon, std::span<double> out);
std::vector<double> epsilon_greedy_row(std::span<const double> q_values, double epsilon);

enum class LearnerMode { Prediction, Control };

struct LearnerConfig {
  ReturnEstimatorSpec estimator;
  double step_size = 0.5;
  LearnerMode mode = LearnerMode::Prediction;
  // Prediction only. Shared read-only across runs.
  std::shared_ptr<const DiscretePolicy> behaviour;
  std::shared_ptr<const DiscretePolicy> target;
  // Control only.
  double epsilon = 0.1;
  std::size_t episode_cap = 100000;
  double divergence_threshold = 1e6;
  /// Called after each update with the updated time index and its target.
  std::function<void(std::size_t tau, double target)> on_update;

  /// Throws std::invalid_argument (SupportError for missing support).
  void validate() const;
};

struct EpisodeMetrics {
  double episode_return = 0.0;  // undiscounted
  std::size_t length = 0;
  std::size_t updates = 0;
  bool truncated = false;
  bool diverged = false;
};

/// Mutable state of one learning run. Owned by exactly one worker.
template <ActionValueFunction Q>
struct RunState {
  RunState(Q initial, std::uint64_t seed) : values(std::move(initial)), rng(seed) {}

  Q values;
  std::size_t episodes = 0;
  std::vector<EpisodeMetrics> history;
  bool diverged = false;
  Rng rng;
};

namespace detail {

inline constexpr std::size_t kMaxActions = 16;
using Row = std::array<double, kMaxActions>;

struct FixedPolicies {
  const DiscretePolicy& behaviour;
  const DiscretePolicy& target;

  template <class Q>
  void behaviour_row(StateId s, const Q&, std::span<double> out) const {
    const auto r = behaviour.row(s);
    std::copy(r.begin(), r.end(), out.begin());
  }
  template <class Q>
  void target_row(StateId s, const Q&, std::span<double> out) const {
    const auto r = target.row(s);
    std::copy(r.begin(), r.end(), out.begin());
  }
  static constexpr bool kOnPolicy = false;
};

struct EpsilonGreedyPolicies {
  double epsilon;

  template <class Q>
  void behaviour_row(const typename Q::Observation& obs, const Q& q, std::span<double> out) const {
    Row vals{};
    auto v = std::span<double>(vals).first(out.size());
    q.action_values(obs, v);
    epsilon_greedy_row(v, epsilon, out);
  }
  template <class Q>
  void target_row(const typename Q::Observation& obs, const Q& q, std::span<double> out) const {
    behaviour_row(obs, q, out);
  }
  static constexpr bool kOnPolicy = true;
};

template <class Q, class Policies>
StepSample read_sample(const Q& q, const Policies& policies, const typename Q::Observation& obs,
                       ActionId a, double reward, double rho, std::size_t actions) {
  Row pi_buf{};
  Row q_buf{};
  auto pi = std::span<double>(pi_buf).first(actions);
  auto qs = std::span<double>(q_buf).first(actions);
  policies.target_row(obs, q, pi);
  q.action_values(obs, qs);
  double expected = 0.0;
  for (std::size_t b = 0; b < actions; ++b) expected += pi[b] * qs[b];
  return StepSample{reward, rho, pi[a], qs[a], expected, expected};
}

/// Online n-step loop shared by prediction and control. Each visited pair is
/// updated once, as soon as its window closes, using Q as it is at that time.
template <Environment Env, ActionValueFunction Q, class Policies>
EpisodeMetrics run_episode(RunState<Q>& state, Env& env, const LearnerConfig& config,
                           const Policies& policies) {
  using Obs = typename Env::Observation;
  EpisodeMetrics metrics;
  if (state.diverged) {
    metrics.diverged = true;
    state.history.push_back(metrics);
    ++state.episodes;
    return metrics;
  }

  const std::size_t actions = env.action_count();
  if (actions == 0 || actions > kMaxActions) throw std::invalid_argument("learner: unsupported action count");
  const std::size_t n = config.estimator.n;
  const double gamma = config.estimator.gamma;

  std::vector<Obs> states;
  std::vector<ActionId> acts;
  std::vector<double> rewards;
  std::vector<double> rhos;

  auto choose = [&](const Obs& obs) {
    Row mu_buf{};
    auto mu = std::span<double>(mu_buf).first(actions);
    policies.behaviour_row(obs, state.values, mu);
    const ActionId a = state.rng.categorical(mu);
    double rho = 1.0;
    if constexpr (!Policies::kOnPolicy) {
      Row pi_buf{};
      auto pi = std::span<double>(pi_buf).first(actions);
      policies.target_row(obs, state.values, pi);
      rho = importance_ratio(pi[a], mu[a]);
    }
    states.push_back(obs);
    acts.push_back(a);
    rhos.push_back(rho);
  };

  std::vector<StepSample> samples;
  samples.reserve(n + 1);
  auto update = [&](std::size_t tau, std::size_t end, bool bootstrap) -> bool {
    samples.clear();
    const std::size_t last = bootstrap ? end : end - 1;
    for (std::size_t k = tau; k <= last; ++k) {
      samples.push_back(read_sample(state.values, policies, states[k], acts[k],
                                    k < rewards.size() ? rewards[k] : 0.0, rhos[k], actions));
    }
    ReturnContext ctx{std::span<const StepSample>(samples).first(end - tau), std::nullopt, gamma};
    if (bootstrap) ctx.bootstrap = samples.back();
    const double target = nstep_return(config.estimator, ctx);
    const double updated =
        apply_update(state.values, states[tau], acts[tau], config.step_size, target);
    ++metrics.updates;
    if (config.on_update) config.on_update(tau, target);
    return std::isfinite(updated) && std::abs(updated) <= config.divergence_threshold;
  };

  choose(env.reset(state.rng));
  std::size_t horizon = std::numeric_limits<std::size_t>::max();
  bool truncated = false;
  for (std::size_t t = 0;; ++t) {
    if (t < horizon) {
      const auto out = env.step(states[t], acts[t], state.rng);
      rewards.push_back(out.reward);
      metrics.episode_return += out.reward;
      if (out.terminal) {
        horizon = t + 1;
      } else {
        choose(out.next);
        if (t + 1 >= config.episode_cap) {
          horizon = t + 1;
          truncated = true;
        }
      }
    }
    if (t + 1 >= n) {
      const std::size_t tau = t + 1 - n;
      if (tau < horizon) {
        const std::size_t end = std::min(tau + n, horizon);
        const bool bootstrap = end < horizon || truncated;
        if (!update(tau, end, bootstrap)) {
          state.diverged = true;
          metrics.diverged = true;
          break;
        }
      }
      if (tau + 1 >= horizon) break;
    }
  }

  metrics.length = rewards.size();
  metrics.truncated = truncated;
  state.history.push_back(metrics);
  ++state.episodes;
  return metrics;
}

}  // namespace detail

/// One episode of off-policy (or on-policy) prediction with fixed behaviour
/// and target policies. Requires config.mode == Prediction.
template <TabularEnvironment Env, ActionValueFunction Q>
EpisodeMetrics run_prediction_episode(RunState<Q>& state, Env& env, const LearnerConfig& config) {
  if (config.mode != LearnerMode::Prediction) throw std::invalid_argument("run_prediction_episode: not in prediction mode");
  return detail::run_episode(state, env, config,
                             detail::FixedPolicies{*config.behaviour, *config.target});
}

/// One episode of on-policy control; behaviour and target are both
/// epsilon-greedy in the current Q, so every importance ratio is 1.
template <Environment Env, ActionValueFunction Q>
EpisodeMetrics run_control_episode(RunState<Q>& state, Env& env, const LearnerConfig& config) {
  if (config.mode != LearnerMode::Control) throw std::invalid_argument("run_control_episode: not in control mode");
  return detail::run_episode(state, env, config, detail::EpsilonGreedyPolicies{config.epsilon});
}

}  // namespace pdcv
