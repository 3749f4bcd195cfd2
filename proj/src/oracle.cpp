#include "pdcv/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace pdcv {

namespace {

double backup(const TabularMdp& model, const DiscretePolicy& policy, const TabularQ& q,
              StateId s, ActionId a) {
  double total = 0.0;
  for (const auto& o : model.outcomes(s, a)) {
    double next = 0.0;
    if (!model.is_terminal(o.next_state)) {
      const auto row = policy.row(o.next_state);
      for (ActionId b = 0; b < row.size(); ++b) next += row[b] * q.value(o.next_state, b);
    }
    total += o.probability * (o.reward + model.gamma() * next);
  }
  return total;
}

StepSample sample_at(const DiscretePolicy& mu, const DiscretePolicy& pi, const TabularQ& q,
                     StateId s, ActionId a) {
  const auto row = pi.row(s);
  double expected = 0.0;
  for (ActionId b = 0; b < row.size(); ++b) expected += row[b] * q.value(s, b);
  return StepSample{0.0, importance_ratio(pi.prob(s, a), mu.prob(s, a)), pi.prob(s, a),
                    q.value(s, a), expected, expected};
}

struct Enumerator {
  const TabularMdp& model;
  const DiscretePolicy& mu;
  const DiscretePolicy& pi;
  const ReturnEstimatorSpec& spec;
  const TabularQ& q;
  std::size_t max_branches;
  std::size_t leaves = 0;
  std::vector<StepSample> path;

  double score(std::size_t rewards, bool bootstrap) {
    if (++leaves > max_branches) {
      throw EnumerationSizeError("enumerate_expected_return: more than " +
                                 std::to_string(max_branches) + " branches");
    }
    ReturnContext ctx{std::span<const StepSample>(path).first(rewards), std::nullopt,
                      model.gamma()};
    if (bootstrap) ctx.bootstrap = path[rewards];
    return nstep_return(spec, ctx);
  }

  // path[depth] holds (S_depth, A_depth); expands its reward and successor.
  double expand(StateId s, ActionId a, std::size_t depth) {
    double total = 0.0;
    for (const auto& o : model.outcomes(s, a)) {
      path[depth].reward = o.reward;
      if (model.is_terminal(o.next_state)) {
        total += o.probability * score(depth + 1, false);
        continue;
      }
      const auto row = mu.row(o.next_state);
      for (ActionId b = 0; b < row.size(); ++b) {
        if (row[b] <= 0.0) continue;
        path.resize(depth + 1);
        path.push_back(sample_at(mu, pi, q, o.next_state, b));
        const double value = depth + 1 == spec.n ? score(depth + 1, true)
                                                 : expand(o.next_state, b, depth + 1);
        total += o.probability * row[b] * value;
      }
      path.resize(depth + 1);
    }
    return total;
  }
};

}  // namespace

double bellman_residual(const TabularMdp& model, const DiscretePolicy& policy, const TabularQ& q) {
  double worst = 0.0;
  for (StateId s = 0; s < model.state_count(); ++s) {
    if (model.is_terminal(s)) continue;
    for (ActionId a = 0; a < model.action_count(s); ++a) {
      worst = std::max(worst, std::abs(backup(model, policy, q, s, a) - q.value(s, a)));
    }
  }
  return worst;
}

ExactQTable exact_q(const TabularMdp& model, const DiscretePolicy& policy, double tol,
                    std::size_t max_sweeps) {
  if (!(tol > 0.0)) throw std::invalid_argument("exact_q: tol must be positive");
  if (policy.state_count() != model.state_count()) {
    throw std::invalid_argument("exact_q: policy and model disagree on state count");
  }
  TabularQ q(model);
  TabularQ next(model);
  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (StateId s = 0; s < model.state_count(); ++s) {
      if (model.is_terminal(s)) continue;
      for (ActionId a = 0; a < model.action_count(s); ++a) {
        const double v = backup(model, policy, q, s, a);
        change = std::max(change, std::abs(v - q.value(s, a)));
        next.at(s, a) = v;
      }
    }
    std::swap(q, next);
    if (!std::isfinite(change)) break;
    if (change < tol) {
      ExactQTable table{std::move(q), 0.0, sweep, {}};
      table.residual = bellman_residual(model, policy, table.q);
      for (StateId s = 0; s < model.state_count(); ++s) {
        if (model.is_terminal(s)) continue;
        for (ActionId a = 0; a < model.action_count(s); ++a) table.pairs.emplace_back(s, a);
      }
      return table;
    }
  }
  throw NonConvergenceError("exact_q: no convergence; is the policy proper?");
}

RmsError rms_error(const TabularQ& q, const ExactQTable& truth, double sentinel) {
  if (truth.pairs.empty()) throw std::invalid_argument("rms_error: truth has no pairs");
  double sum = 0.0;
  for (const auto& [s, a] : truth.pairs) {
    const double v = q.value(s, a);
    if (!std::isfinite(v)) return {sentinel, true};
    const double d = v - truth.q.value(s, a);
    sum += d * d;
  }
  const double rms = std::sqrt(sum / static_cast<double>(truth.pairs.size()));
  if (!std::isfinite(rms)) return {sentinel, true};
  return {rms, false};
}

double enumerate_expected_return(const TabularMdp& model, const DiscretePolicy& mu,
                                 const DiscretePolicy& pi, const ReturnEstimatorSpec& spec,
                                 const TabularQ& q, StateId start_state, ActionId start_action,
                                 std::size_t max_branches) {
  spec.validate();
  if (model.is_terminal(start_state)) {
    throw std::invalid_argument("enumerate_expected_return: start state is terminal");
  }
  Enumerator e{model, mu, pi, spec, q, max_branches, 0, {}};
  e.path.push_back(sample_at(mu, pi, q, start_state, start_action));
  return e.expand(start_state, start_action, 0);
}

void write_truth_csv(std::ostream& out, const ExactQTable& truth) {
  out << "state,action,q\n";
  char buf[64];
  for (const auto& [s, a] : truth.pairs) {
    std::snprintf(buf, sizeof buf, "%.17g", truth.q.value(s, a));
    out << s << ',' << a << ',' << buf << '\n';
  }
}

}  // namespace pdcv
