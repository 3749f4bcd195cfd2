#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdcv/function_approx.hpp"
#include "pdcv/mdp.hpp"
#include "pdcv/returns.hpp"

namespace pdcv {

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// q_pi of a TabularMdp. Terminal rows are zero; `pairs` lists the
/// non-terminal (state, action) pairs the table is scored on.
struct ExactQTable {
  TabularQ q;
  double residual;
  std::size_t sweeps;
  std::vector<std::pair<StateId, ActionId>> pairs;
};

/// Largest |T_pi q - q| over non-terminal pairs, T_pi the Bellman operator.
double bellman_residual(const TabularMdp& model, const DiscretePolicy& policy, const TabularQ& q);

/// Synchronous sweeps of the Bellman operator from q = 0 until the residual
/// falls below `tol`. Throws NonConvergenceError after `max_sweeps`.
ExactQTable exact_q(const TabularMdp& model, const DiscretePolicy& policy, double tol = 1e-10,
                    std::size_t max_sweeps = 1'000'000);

struct RmsError {
  double value;
  bool diverged;
};

/// Root-mean-square error over the truth's non-terminal pairs, uniformly
/// weighted. Any non-finite entry yields {sentinel, true}.
RmsError rms_error(const TabularQ& q, const ExactQTable& truth, double sentinel = 1e6);

/// Exact expectation, under behaviour `mu` and the model's dynamics, of the
/// estimator's return from the pair (start_state, start_action). The
/// recursion is expanded over every branch for spec.n steps or until
/// termination, and each leaf is scored by the same code the learners use.
/// The model's discount is used. V for the state-value form is E_pi[Q].
/// Throws EnumerationSizeError once more than `max_branches` leaves are seen.
double enumerate_expected_return(const TabularMdp& model, const DiscretePolicy& mu,
                                 const DiscretePolicy& pi, const ReturnEstimatorSpec& spec,
                                 const TabularQ& q, StateId start_state, ActionId start_action,
                                 std::size_t max_branches = 1'000'000);

/// CSV with header `state,action,q` over every non-terminal pair.
void write_truth_csv(std::ostream& out, const ExactQTable& truth);

}  // namespace pdcv
