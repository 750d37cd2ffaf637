#pragma once

#include <cstddef>
#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

// All values use the return convention sum_{t>=0} gamma^t r(S_t): the start
// state's reward is counted at weight one.

/// V(s) = r(s) + gamma * sum_a pi(a|s) sum_s' T(s'|s,a) V(s'), solved by
/// Jacobi sweeps until the Bellman residual drops below `residual`.
std::vector<double> policy_value(const TabularSystem& system, const Policy& policy, const RewardModel& reward,
                                 double gamma, double residual = 1e-8);

/// sum_s D0(s) V(s) for V = policy_value(...).
double expected_state_value(const TabularSystem& system, const Policy& policy, const RewardModel& reward,
                            double gamma, double residual = 1e-8);

/// sum_{t<horizon} gamma^t E[r(S_t)] from every start state.
std::vector<double> finite_horizon_value(const TabularSystem& system, const Policy& policy,
                                         const RewardModel& reward, double gamma, std::size_t horizon);

/// sum_t gamma^t r(S_t) along a single trajectory.
double discounted_return(const Trajectory& trajectory, const RewardModel& reward, double gamma);

struct SoftValueResult {
  std::vector<double> values;  ///< V_soft(s) = log sum_a exp Q(s,a)
  std::vector<double> q;       ///< Q(s,a), row-major [s][a]
  Policy policy;               ///< pi(a|s) = exp(Q(s,a) - V(s)), rows renormalized
  std::size_t sweeps = 0;
  double residual = 0.0;
};

struct SoftValueOptions {
  double tolerance = 1e-8;
  std::size_t max_sweeps = 10'000;
};

/// Soft (log-sum-exp) value iteration from zero-initialized values. Throws
/// ConvergenceError when the max-norm change is still above tolerance after
/// max_sweeps.
SoftValueResult soft_value_iteration(const TabularSystem& system, const RewardModel& reward, double gamma,
                                     const SoftValueOptions& options = {});

struct OptimalValueResult {
  std::vector<double> values;
  Policy policy;  ///< greedy, lowest action index on ties
  std::size_t sweeps = 0;
  double residual = 0.0;
};

/// Standard (max) value iteration; V_*(T) at every state.
OptimalValueResult value_iteration(const TabularSystem& system, const RewardModel& reward, double gamma,
                                   double tolerance = 1e-10, std::size_t max_sweeps = 100'000);

}  // namespace iso
