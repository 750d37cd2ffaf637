#include "iso/mdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "iso/core/errors.hpp"

namespace iso {
namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvariantViolation("discount factor must lie in (0, 1)");
}

// Dense state-to-state matrix P_pi[s][s'] = sum_a pi(a|s) T(s'|s,a).
std::vector<double> state_kernel(const TabularSystem& system, const Policy& policy) {
  const std::size_t ns = system.n_states();
  std::vector<double> kernel(ns * ns, 0.0);
  for (StateIndex s = 0; s < ns; ++s) {
    for (ActionIndex a = 0; a < system.n_actions(); ++a) {
      const double p = policy(s, a);
      if (p == 0.0) continue;
      for (StateIndex next : system.connectivity().successors(s, a)) {
        kernel[s * ns + next] += p * system.transition(s, a, next);
      }
    }
  }
  return kernel;
}

// Expected next-state value sum_s' T(s'|s,a) V(s') over the allowed successors.
double expected_next(const TabularSystem& system, StateIndex s, ActionIndex a, const std::vector<double>& values) {
  double acc = 0.0;
  for (StateIndex next : system.connectivity().successors(s, a)) acc += system.transition(s, a, next) * values[next];
  return acc;
}

}  // namespace

std::vector<double> policy_value(const TabularSystem& system, const Policy& policy, const RewardModel& reward,
                                 double gamma, double residual) {
  check_gamma(gamma);
  check_compatible(system, policy);
  check_compatible(system, reward);
  const std::size_t ns = system.n_states();
  const auto kernel = state_kernel(system, policy);
  std::vector<double> v(ns, 0.0);
  std::vector<double> next(ns);
  constexpr std::size_t kMaxSweeps = 10'000'000;
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    delta = 0.0;
    for (StateIndex s = 0; s < ns; ++s) {
      double acc = 0.0;
      const double* row = kernel.data() + s * ns;
      for (StateIndex t = 0; t < ns; ++t) acc += row[t] * v[t];
      next[s] = reward(s) + gamma * acc;
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (delta < residual) return v;
  }
  throw ConvergenceError("policy evaluation did not converge", delta, kMaxSweeps);
}

double expected_state_value(const TabularSystem& system, const Policy& policy, const RewardModel& reward,
                            double gamma, double residual) {
  const auto v = policy_value(system, policy, reward, gamma, residual);
  const auto& d0 = system.initial_distribution();
  return std::inner_product(d0.begin(), d0.end(), v.begin(), 0.0);
}

std::vector<double> finite_horizon_value(const TabularSystem& system, const Policy& policy,
                                         const RewardModel& reward, double gamma, std::size_t horizon) {
  check_compatible(system, policy);
  check_compatible(system, reward);
  const std::size_t ns = system.n_states();
  const auto kernel = state_kernel(system, policy);
  std::vector<double> v(ns, 0.0);
  std::vector<double> next(ns);
  for (std::size_t k = 0; k < horizon; ++k) {
    for (StateIndex s = 0; s < ns; ++s) {
      double acc = 0.0;
      for (StateIndex t = 0; t < ns; ++t) acc += kernel[s * ns + t] * v[t];
      next[s] = reward(s) + gamma * acc;
    }
    v.swap(next);
  }
  return v;
}

double discounted_return(const Trajectory& trajectory, const RewardModel& reward, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (const auto& step : trajectory.steps) {
    total += weight * reward(step.state);
    weight *= gamma;
  }
  return total;
}

SoftValueResult soft_value_iteration(const TabularSystem& system, const RewardModel& reward, double gamma,
                                     const SoftValueOptions& options) {
  check_gamma(gamma);
  check_compatible(system, reward);
  if (!(options.tolerance > 0.0)) throw InvariantViolation("soft value iteration tolerance must be positive");
  const std::size_t ns = system.n_states();
  const std::size_t na = system.n_actions();
  std::vector<double> v(ns, 0.0);
  std::vector<double> q(ns * na, 0.0);
  std::vector<double> next(ns);
  double delta = std::numeric_limits<double>::infinity();
  std::size_t sweep = 0;
  while (true) {
    if (sweep == options.max_sweeps) throw ConvergenceError("soft value iteration did not converge", delta, sweep);
    ++sweep;
    delta = 0.0;
    for (StateIndex s = 0; s < ns; ++s) {
      double peak = -std::numeric_limits<double>::infinity();
      for (ActionIndex a = 0; a < na; ++a) {
        q[s * na + a] = reward(s) + gamma * expected_next(system, s, a, v);
        peak = std::max(peak, q[s * na + a]);
      }
      double sum = 0.0;
      for (ActionIndex a = 0; a < na; ++a) sum += std::exp(q[s * na + a] - peak);
      next[s] = peak + std::log(sum);
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (delta < options.tolerance) break;
  }
  // Q consistent with the final values so that log-ratios match exactly.
  for (StateIndex s = 0; s < ns; ++s) {
    for (ActionIndex a = 0; a < na; ++a) q[s * na + a] = reward(s) + gamma * expected_next(system, s, a, v);
  }
  std::vector<double> probs(ns * na);
  std::vector<double> soft(ns);
  for (StateIndex s = 0; s < ns; ++s) {
    const double peak = *std::max_element(q.begin() + s * na, q.begin() + (s + 1) * na);
    double sum = 0.0;
    for (ActionIndex a = 0; a < na; ++a) {
      probs[s * na + a] = std::exp(q[s * na + a] - peak);
      sum += probs[s * na + a];
    }
    for (ActionIndex a = 0; a < na; ++a) probs[s * na + a] /= sum;
    soft[s] = peak + std::log(sum);
  }
  return SoftValueResult{std::move(soft), std::move(q), Policy(ns, na, std::move(probs)), sweep, delta};
}

OptimalValueResult value_iteration(const TabularSystem& system, const RewardModel& reward, double gamma,
                                   double tolerance, std::size_t max_sweeps) {
  check_gamma(gamma);
  check_compatible(system, reward);
  const std::size_t ns = system.n_states();
  const std::size_t na = system.n_actions();
  std::vector<double> v(ns, 0.0);
  std::vector<double> next(ns);
  double delta = std::numeric_limits<double>::infinity();
  std::size_t sweep = 0;
  while (true) {
    if (sweep == max_sweeps) throw ConvergenceError("value iteration did not converge", delta, sweep);
    ++sweep;
    delta = 0.0;
    for (StateIndex s = 0; s < ns; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (ActionIndex a = 0; a < na; ++a) best = std::max(best, expected_next(system, s, a, v));
      next[s] = reward(s) + gamma * best;
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (delta < tolerance) break;
  }
  std::vector<ActionIndex> choice(ns, 0);
  for (StateIndex s = 0; s < ns; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (ActionIndex a = 0; a < na; ++a) {
      const double value = expected_next(system, s, a, v);
      if (value > best + 1e-12) {
        best = value;
        choice[s] = a;
      }
    }
  }
  return OptimalValueResult{std::move(v), Policy::deterministic(na, choice), sweep, delta};
}

}  // namespace iso
