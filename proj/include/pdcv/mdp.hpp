#pragma once

#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdcv/rng.hpp"

namespace pdcv {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Raised when a behaviour policy cannot have produced an action the
/// estimator needs to correct for.
class SupportError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// pi_prob / mu_prob. Throws SupportError when mu_prob is not positive.
double importance_ratio(double pi_prob, double mu_prob);

/// Per-state probability rows over actions. Immutable once built.
class DiscretePolicy {
 public:
  static constexpr double kRowTolerance = 1e-12;

  /// Validates that every row is non-negative and sums to 1.
  explicit DiscretePolicy(std::vector<std::vector<double>> rows);

  static DiscretePolicy uniform(std::size_t state_count, std::size_t action_count);

  std::size_t state_count() const { return rows_.size(); }
  std::span<const double> row(StateId s) const { return rows_.at(s); }
  double prob(StateId s, ActionId a) const { return rows_.at(s).at(a); }

 private:
  std::vector<std::vector<double>> rows_;
};

/// Throws SupportError unless behaviour puts mass on every action target does.
void check_support(const DiscretePolicy& behaviour, const DiscretePolicy& target);

ActionId sample_action(const DiscretePolicy& policy, StateId state, Rng& rng);

template <class Obs>
struct StepOutcome {
  double reward;
  Obs next;
  bool terminal;
};

/// What the samplers and learners need from an environment. Steps take the
/// generator so stochastic models can draw from it; deterministic ones ignore it.
template <class E>
concept Environment = requires(E& env, const E& cenv, Rng& rng,
                               const typename E::Observation& obs, ActionId a) {
  typename E::Observation;
  { env.reset(rng) } -> std::same_as<typename E::Observation>;
  { cenv.step(obs, a, rng) } -> std::same_as<StepOutcome<typename E::Observation>>;
  { cenv.action_count() } -> std::convertible_to<std::size_t>;
};

template <class E>
concept TabularEnvironment =
    Environment<E> && std::same_as<typename E::Observation, StateId> &&
    requires(const E& cenv) {
      { cenv.state_count() } -> std::convertible_to<std::size_t>;
    };

template <class Obs>
struct Transition {
  Obs state;
  ActionId action;
  double reward;
  Obs next_state;
  std::optional<ActionId> next_action;  // absent iff terminal
  double rho;
  bool terminal;
};

template <class Obs>
struct Trajectory {
  std::vector<Transition<Obs>> transitions;
  bool truncated = false;

  std::size_t size() const { return transitions.size(); }
  double undiscounted_return() const {
    double g = 0.0;
    for (const auto& tr : transitions) g += tr.reward;
    return g;
  }
};

/// True when consecutive transitions chain and only the last may be terminal.
template <class Obs>
bool is_well_formed(const Trajectory<Obs>& traj) {
  const auto& ts = traj.transitions;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const bool last = k + 1 == ts.size();
    if (ts[k].terminal != !ts[k].next_action.has_value()) return false;
    if (ts[k].terminal && !last) return false;
    if (ts[k].rho < 0.0) return false;
    if (!last) {
      if (!(ts[k].next_state == ts[k + 1].state)) return false;
      if (*ts[k].next_action != ts[k + 1].action) return false;
    }
  }
  if (traj.truncated && !ts.empty() && ts.back().terminal) return false;
  return true;
}

/// Rolls out one episode under `behaviour`, recording importance ratios
/// against `target`. Sets `truncated` when max_steps is reached first.
template <TabularEnvironment Env>
Trajectory<StateId> sample_episode(Env& env, const DiscretePolicy& behaviour,
                                   const DiscretePolicy& target, Rng& rng,
                                   std::size_t max_steps) {
  if (max_steps < 1) throw std::invalid_argument("sample_episode: max_steps must be >= 1");
  Trajectory<StateId> traj;
  StateId s = env.reset(rng);
  ActionId a = sample_action(behaviour, s, rng);
  for (std::size_t t = 0; t < max_steps; ++t) {
    const auto out = env.step(s, a, rng);
    Transition<StateId> tr{s, a, out.reward, out.next, std::nullopt,
                           importance_ratio(target.prob(s, a), behaviour.prob(s, a)),
                           out.terminal};
    if (!out.terminal) tr.next_action = sample_action(behaviour, out.next, rng);
    traj.transitions.push_back(tr);
    if (out.terminal) return traj;
    s = out.next;
    a = *tr.next_action;
  }
  traj.truncated = true;
  return traj;
}

/// One (reward, next state) branch of a state-action pair's dynamics.
struct Outcome {
  double probability;
  double reward;
  StateId next_state;
};

/// Explicit finite model p(r, s' | s, a) used by the exact oracles.
class TabularMdp {
 public:
  static constexpr double kTolerance = 1e-12;

  /// `dynamics[pair_index(s, a)]` lists the outcomes of (s, a), pairs laid out
  /// state-major with action_counts[s] entries per state. Terminal states must
  /// have empty outcome lists. Throws std::invalid_argument on malformed input.
  TabularMdp(std::vector<std::size_t> action_counts,
             std::vector<std::vector<Outcome>> dynamics, std::vector<bool> terminal,
             double gamma, std::vector<double> start_distribution);

  std::size_t state_count() const { return action_counts_.size(); }
  std::size_t action_count(StateId s) const { return action_counts_.at(s); }
  std::size_t pair_count() const { return dynamics_.size(); }
  std::size_t pair_index(StateId s, ActionId a) const;
  bool is_terminal(StateId s) const { return terminal_.at(s); }
  double gamma() const { return gamma_; }
  std::span<const double> start_distribution() const { return start_; }
  std::span<const Outcome> outcomes(StateId s, ActionId a) const {
    return dynamics_[pair_index(s, a)];
  }

 private:
  std::vector<std::size_t> action_counts_;
  std::vector<std::size_t> offsets_;
  std::vector<std::vector<Outcome>> dynamics_;
  std::vector<bool> terminal_;
  double gamma_;
  std::vector<double> start_;
};

/// Adapts a TabularMdp to the Environment concept. Draws from the generator
/// only where the model actually branches, so a deterministic model consumes
/// exactly the draws the policy makes.
class ModelEnvironment {
 public:
  using Observation = StateId;

  explicit ModelEnvironment(const TabularMdp& model);

  StateId reset(Rng& rng);
  StepOutcome<StateId> step(StateId s, ActionId a, Rng& rng) const;
  std::size_t action_count() const { return max_actions_; }
  std::size_t state_count() const { return model_->state_count(); }

 private:
  const TabularMdp* model_;
  std::size_t max_actions_ = 0;
};

}  // namespace pdcv
