#include "pdcv/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdcv {

namespace {

void check_distribution(std::span<const double> probs, double tol, const std::string& what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument(what + ": negative or NaN probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::invalid_argument(what + ": probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

double importance_ratio(double pi_prob, double mu_prob) {
  if (!(mu_prob > 0.0)) {
    throw SupportError("importance_ratio: behaviour probability must be positive");
  }
  return pi_prob / mu_prob;
}

DiscretePolicy::DiscretePolicy(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  for (std::size_t s = 0; s < rows_.size(); ++s) {
    if (rows_[s].empty()) throw std::invalid_argument("DiscretePolicy: empty row");
    check_distribution(rows_[s], kRowTolerance, "DiscretePolicy row " + std::to_string(s));
  }
}

DiscretePolicy DiscretePolicy::uniform(std::size_t state_count, std::size_t action_count) {
  return DiscretePolicy(std::vector<std::vector<double>>(
      state_count, std::vector<double>(action_count, 1.0 / static_cast<double>(action_count))));
}

void check_support(const DiscretePolicy& behaviour, const DiscretePolicy& target) {
  if (behaviour.state_count() != target.state_count()) {
    throw std::invalid_argument("check_support: policies cover different state counts");
  }
  for (StateId s = 0; s < target.state_count(); ++s) {
    const auto mu = behaviour.row(s);
    const auto pi = target.row(s);
    if (mu.size() != pi.size()) {
      throw std::invalid_argument("check_support: action count mismatch at state " +
                                  std::to_string(s));
    }
    for (std::size_t a = 0; a < pi.size(); ++a) {
      if (pi[a] > 0.0 && !(mu[a] > 0.0)) {
        throw SupportError("behaviour policy lacks support for action " + std::to_string(a) +
                           " in state " + std::to_string(s));
      }
    }
  }
}

ActionId sample_action(const DiscretePolicy& policy, StateId state, Rng& rng) {
  return rng.categorical(policy.row(state));
}

TabularMdp::TabularMdp(std::vector<std::size_t> action_counts,
                       std::vector<std::vector<Outcome>> dynamics, std::vector<bool> terminal,
                       double gamma, std::vector<double> start_distribution)
    : action_counts_(std::move(action_counts)),
      dynamics_(std::move(dynamics)),
      terminal_(std::move(terminal)),
      gamma_(gamma),
      start_(std::move(start_distribution)) {
  const std::size_t n = action_counts_.size();
  if (terminal_.size() != n || start_.size() != n) {
    throw std::invalid_argument("TabularMdp: per-state arrays disagree in length");
  }
  if (!(gamma_ >= 0.0 && gamma_ <= 1.0)) throw std::invalid_argument("TabularMdp: gamma outside [0,1]");
  offsets_.resize(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s) offsets_[s + 1] = offsets_[s] + action_counts_[s];
  if (dynamics_.size() != offsets_[n]) {
    throw std::invalid_argument("TabularMdp: dynamics size does not match action counts");
  }
  check_distribution(start_, kTolerance, "TabularMdp start distribution");
  for (StateId s = 0; s < n; ++s) {
    for (ActionId a = 0; a < action_counts_[s]; ++a) {
      const auto& outs = dynamics_[offsets_[s] + a];
      const std::string where = "TabularMdp (" + std::to_string(s) + "," + std::to_string(a) + ")";
      if (terminal_[s]) {
        if (!outs.empty()) throw std::invalid_argument(where + ": terminal state has dynamics");
        continue;
      }
      std::vector<double> probs;
      for (const auto& o : outs) {
        if (o.next_state >= n) throw std::invalid_argument(where + ": successor out of range");
        probs.push_back(o.probability);
      }
      check_distribution(probs, kTolerance, where);
    }
  }
}

std::size_t TabularMdp::pair_index(StateId s, ActionId a) const {
  if (s >= action_counts_.size() || a >= action_counts_[s]) {
    throw std::out_of_range("TabularMdp: state-action pair out of range");
  }
  return offsets_[s] + a;
}

ModelEnvironment::ModelEnvironment(const TabularMdp& model) : model_(&model) {
  for (StateId s = 0; s < model.state_count(); ++s) {
    max_actions_ = std::max(max_actions_, model.action_count(s));
  }
}

StateId ModelEnvironment::reset(Rng& rng) {
  const auto start = model_->start_distribution();
  std::size_t support = 0;
  StateId only = 0;
  for (StateId s = 0; s < start.size(); ++s) {
    if (start[s] > 0.0) {
      ++support;
      only = s;
    }
  }
  return support == 1 ? only : rng.categorical(start);
}

StepOutcome<StateId> ModelEnvironment::step(StateId s, ActionId a, Rng& rng) const {
  if (model_->is_terminal(s)) throw std::logic_error("ModelEnvironment: step from terminal state");
  const auto outs = model_->outcomes(s, a);
  std::size_t pick = 0;
  if (outs.size() > 1) {
    std::vector<double> probs;
    probs.reserve(outs.size());
    for (const auto& o : outs) probs.push_back(o.probability);
    pick = rng.categorical(probs);
  }
  const auto& o = outs[pick];
  return {o.reward, o.next_state, model_->is_terminal(o.next_state)};
}

}  // namespace pdcv
