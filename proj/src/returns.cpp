#include "pdcv/returns.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace pdcv {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 5> kVariantNames{{
    {Variant::SarsaIs, "sarsa_is"},
    {Variant::ExpectedSarsa, "expected_sarsa"},
    {Variant::CvSarsa, "cv_sarsa"},
    {Variant::TreeBackup, "tree_backup"},
    {Variant::StateCv, "state_cv"},
}};

const StepSample* successor(const ReturnContext& ctx, std::size_t k) {
  if (k + 1 < ctx.steps.size()) return &ctx.steps[k + 1];
  return ctx.bootstrap ? &*ctx.bootstrap : nullptr;
}

void require_nonempty(const ReturnContext& ctx) {
  if (ctx.steps.empty()) throw std::invalid_argument("n-step return: empty window");
}

// Shared backward pass for the action-value recursions
//   G_k = R_{k+1} + gamma * combine(next, G_{k+1}, is_last)
// where a terminal successor contributes nothing.
template <class Combine>
double backward(const ReturnContext& ctx, Combine combine) {
  require_nonempty(ctx);
  const std::size_t m = ctx.steps.size();
  double g = 0.0;
  for (std::size_t k = m; k-- > 0;) {
    const StepSample* next = successor(ctx, k);
    if (next == nullptr) {
      g = ctx.steps[k].reward;
      continue;
    }
    const bool last = k + 1 == m;
    g = ctx.steps[k].reward + ctx.gamma * combine(*next, last ? next->q : g, last);
  }
  return g;
}

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames) {
    if (n == name) return variant;
  }
  throw std::invalid_argument("unknown estimator variant '" + std::string(name) + "'");
}

void ReturnEstimatorSpec::validate() const {
  if (n < 1) throw std::invalid_argument("ReturnEstimatorSpec: n must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("ReturnEstimatorSpec: gamma outside [0,1]");
  if (!std::isfinite(cv_coefficient)) {
    throw std::invalid_argument("ReturnEstimatorSpec: cv_coefficient must be finite");
  }
}

double nstep_sarsa_is_return(const ReturnContext& ctx) {
  return backward(ctx, [](const StepSample& next, double g, bool) { return next.rho * g; });
}

double nstep_expected_sarsa_return(const ReturnContext& ctx) {
  return backward(ctx, [](const StepSample& next, double g, bool last) {
    return last ? next.expected_q : g;
  });
}

double nstep_cv_sarsa_return(const ReturnContext& ctx, double c) {
  // Grouped so that G' == Q' cancels exactly before E_pi[Q'] is added.
  return backward(ctx, [c](const StepSample& next, double g, bool) {
    return (next.rho * g + c * next.rho * next.q) - c * next.expected_q;
  });
}

double nstep_tree_backup_return(const ReturnContext& ctx) {
  return backward(ctx, [](const StepSample& next, double g, bool) {
    return (next.pi * g - next.pi * next.q) + next.expected_q;
  });
}

double nstep_tree_backup_return_sum_form(std::span<const ActionRowStep> steps,
                                         const std::optional<ActionRowStep>& bootstrap,
                                         double gamma) {
  if (steps.empty()) throw std::invalid_argument("n-step return: empty window");
  const std::size_t m = steps.size();
  double g = 0.0;
  for (std::size_t k = m; k-- > 0;) {
    const ActionRowStep* next = k + 1 < m ? &steps[k + 1] : (bootstrap ? &*bootstrap : nullptr);
    if (next == nullptr) {
      g = steps[k].reward;
      continue;
    }
    const double g_next = k + 1 == m ? next->q[next->action] : g;
    double others = 0.0;
    for (std::size_t a = 0; a < next->pi.size(); ++a) {
      if (a != next->action) others += next->pi[a] * next->q[a];
    }
    g = steps[k].reward + gamma * (next->pi[next->action] * g_next + others);
  }
  return g;
}

double nstep_state_cv_return(const ReturnContext& ctx) {
  require_nonempty(ctx);
  double g = ctx.bootstrap ? ctx.bootstrap->v : 0.0;
  for (std::size_t k = ctx.steps.size(); k-- > 0;) {
    const StepSample& s = ctx.steps[k];
    g = s.rho * (s.reward + ctx.gamma * g) + (1.0 - s.rho) * s.v;
  }
  return g;
}

double nstep_return(const ReturnEstimatorSpec& spec, const ReturnContext& ctx) {
  switch (spec.variant) {
    case Variant::SarsaIs: return nstep_sarsa_is_return(ctx);
    case Variant::ExpectedSarsa: return nstep_expected_sarsa_return(ctx);
    case Variant::CvSarsa: return nstep_cv_sarsa_return(ctx, spec.cv_coefficient);
    case Variant::TreeBackup: return nstep_tree_backup_return(ctx);
    case Variant::StateCv: return nstep_state_cv_return(ctx);
  }
  throw std::logic_error("nstep_return: unhandled variant");
}

ReturnContext window(std::span<const StepSample> samples, bool terminal, std::size_t t,
                     std::size_t n, double gamma) {
  if (t >= samples.size()) throw std::out_of_range("window: start past end of samples");
  if (n < 1) throw std::invalid_argument("window: n must be >= 1");
  const std::size_t m = std::min(n, samples.size() - t);
  ReturnContext ctx{samples.subspan(t, m), std::nullopt, gamma};
  if (t + m < samples.size()) {
    ctx.bootstrap = samples[t + m];
  } else if (!terminal) {
    throw std::logic_error("window: non-terminal sequence has no bootstrap sample");
  }
  return ctx;
}

double lambda_return_weighted(const FrozenEpisode& episode, std::size_t t,
                              const ReturnEstimatorSpec& variant, double lambda) {
  if (!episode.terminal) throw std::logic_error("lambda-return needs a terminated episode");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda outside [0,1]");
  const std::size_t horizon = episode.steps.size() - t;
  double total = 0.0;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double g = nstep_return(variant, window(episode.steps, true, t, n, variant.gamma));
    const double weight = n < horizon
                              ? (1.0 - lambda) * std::pow(lambda, static_cast<double>(n - 1))
                              : std::pow(lambda, static_cast<double>(horizon - 1));
    total += weight * g;
  }
  return total;
}

double lambda_return_tderror_sum(const FrozenEpisode& episode, std::size_t t, double gamma,
                                 double lambda, TdErrorForm form) {
  if (!episode.terminal) throw std::logic_error("lambda-return needs a terminated episode");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda outside [0,1]");
  const auto& s = episode.steps;
  if (t >= s.size()) throw std::out_of_range("lambda-return: t past end of episode");
  double sum = 0.0;
  double weight = 1.0;
  for (std::size_t k = t; k < s.size(); ++k) {
    if (k > t) {
      const double decay = form == TdErrorForm::TreeBackup ? s[k].pi : s[k].rho;
      weight *= gamma * lambda * decay;
    }
    const StepSample* next = k + 1 < s.size() ? &s[k + 1] : nullptr;
    double delta = 0.0;
    switch (form) {
      case TdErrorForm::Sarsa:
        delta = s[k].reward + (next ? gamma * next->rho * next->q : 0.0) - s[k].q;
        break;
      case TdErrorForm::CvSarsa:
      case TdErrorForm::TreeBackup:
        delta = s[k].reward + (next ? gamma * next->expected_q : 0.0) - s[k].q;
        break;
      case TdErrorForm::StateValue:
        delta = s[k].reward + (next ? gamma * next->v : 0.0) - s[k].v;
        break;
    }
    sum += weight * delta;
  }
  if (form == TdErrorForm::StateValue) return s[t].v + s[t].rho * sum;
  return s[t].q + sum;
}

}  // namespace pdcv
