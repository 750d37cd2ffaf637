#include "iso/optimizer/mdp_plus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "iso/core/errors.hpp"

namespace iso {

ReformulatedMdp::ReformulatedMdp(const TabularSystem& system, const Policy& user_policy, const RewardModel& reward,
                                 double gamma)
    : graph_(system.shared_connectivity()), user_(user_policy), reward_(reward.weights()), gamma_(gamma) {
  check_compatible(system, user_policy);
  check_compatible(system, reward);
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvariantViolation("discount factor must lie in (0, 1)");
  initial_.resize(n_composites());
  const auto& d0 = system.initial_distribution();
  for (StateIndex s = 0; s < n_states(); ++s) {
    for (ActionIndex a = 0; a < n_actions(); ++a) initial_[composite(s, a)] = d0[s] * user_(s, a);
  }
}

double ReformulatedMdp::transition(std::size_t composite, StateIndex next_state, std::size_t next_composite) const {
  (void)composite;
  if (state_of(next_composite) != next_state) return 0.0;
  return user_(next_state, action_of(next_composite));
}

SystemPolicy::SystemPolicy(const Connectivity& graph, std::vector<std::vector<double>> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() != graph.n_states() * graph.n_actions()) throw InvariantViolation("system policy has the wrong size");
  for (std::size_t c = 0; c < probs_.size(); ++c) {
    const auto list = graph.successors(c / graph.n_actions(), c % graph.n_actions());
    if (probs_[c].size() != list.size()) throw InvariantViolation("system policy row does not match its actions");
    double total = 0.0;
    for (double p : probs_[c]) {
      if (!(p >= 0.0)) throw InvariantViolation("system policy has a negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > kStochasticTolerance) throw InvariantViolation("system policy row is not stochastic");
  }
}

SystemPolicy as_system_policy(const TabularSystem& system) {
  const auto& graph = system.connectivity();
  std::vector<std::vector<double>> probs(system.n_states() * system.n_actions());
  for (StateIndex s = 0; s < system.n_states(); ++s) {
    for (ActionIndex a = 0; a < system.n_actions(); ++a) {
      auto& row = probs[s * system.n_actions() + a];
      for (StateIndex next : graph.successors(s, a)) row.push_back(system.transition(s, a, next));
    }
  }
  return SystemPolicy(graph, std::move(probs));
}

namespace {

// W(s') = sum_a' pi(a'|s') V+((s',a')): the value of handing the user state s'.
void handoff_values(const ReformulatedMdp& mdp, const std::vector<double>& values, std::vector<double>& out) {
  const auto& user = mdp.user_policy();
  for (StateIndex s = 0; s < mdp.n_states(); ++s) {
    double acc = 0.0;
    for (ActionIndex a = 0; a < mdp.n_actions(); ++a) acc += user(s, a) * values[mdp.composite(s, a)];
    out[s] = acc;
  }
}

}  // namespace

std::vector<double> mdp_plus_policy_value(const ReformulatedMdp& mdp, const SystemPolicy& policy, double residual) {
  const std::size_t nc = mdp.n_composites();
  std::vector<double> v(nc, 0.0), next(nc), handoff(mdp.n_states());
  constexpr std::size_t kMaxSweeps = 10'000'000;
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    handoff_values(mdp, v, handoff);
    delta = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      const auto acts = mdp.actions(c);
      const auto probs = policy.row(c);
      double acc = 0.0;
      for (std::size_t k = 0; k < acts.size(); ++k) acc += probs[k] * handoff[acts[k]];
      next[c] = mdp.reward(c) + mdp.gamma() * acc;
      delta = std::max(delta, std::abs(next[c] - v[c]));
    }
    v.swap(next);
    if (delta < residual) return v;
  }
  throw ConvergenceError("MDP+ policy evaluation did not converge", delta, kMaxSweeps);
}

double mdp_plus_expected_value(const ReformulatedMdp& mdp, const std::vector<double>& values) {
  const auto& d0 = mdp.initial_distribution();
  return std::inner_product(d0.begin(), d0.end(), values.begin(), 0.0);
}

MdpPlusSolution solve_mdp_plus(const ReformulatedMdp& mdp, double tolerance, std::size_t max_sweeps) {
  if (!(tolerance > 0.0)) throw InvariantViolation("MDP+ tolerance must be positive");
  const std::size_t nc = mdp.n_composites();
  std::vector<double> v(nc, 0.0), next(nc), handoff(mdp.n_states());
  double delta = std::numeric_limits<double>::infinity();
  std::size_t sweep = 0;
  while (true) {
    if (sweep == max_sweeps) throw ConvergenceError("MDP+ value iteration did not converge", delta, sweep);
    ++sweep;
    handoff_values(mdp, v, handoff);
    delta = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      double best = -std::numeric_limits<double>::infinity();
      for (StateIndex s : mdp.actions(c)) best = std::max(best, handoff[s]);
      next[c] = mdp.reward(c) + mdp.gamma() * best;
      delta = std::max(delta, std::abs(next[c] - v[c]));
    }
    v.swap(next);
    if (delta < tolerance) break;
  }

  // Greedy extraction against the final values; near-ties resolve to the
  // lowest state index.
  handoff_values(mdp, v, handoff);
  std::vector<std::vector<double>> probs(nc);
  double residual = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto acts = mdp.actions(c);
    double best = -std::numeric_limits<double>::infinity();
    for (StateIndex s : acts) best = std::max(best, handoff[s]);
    const double slack = 1e-12 * std::max(1.0, std::abs(best));
    probs[c].assign(acts.size(), 0.0);
    for (std::size_t k = 0; k < acts.size(); ++k) {
      if (handoff[acts[k]] >= best - slack) {
        probs[c][k] = 1.0;
        break;
      }
    }
    residual = std::max(residual, std::abs(mdp.reward(c) + mdp.gamma() * best - v[c]));
  }
  return MdpPlusSolution{SystemPolicy(mdp.connectivity(), std::move(probs)), std::move(v), residual, sweep};
}

TabularSystem extract_transition(const SystemPolicy& policy, const TabularSystem& system) {
  const auto& graph = system.connectivity();
  const std::size_t ns = system.n_states();
  const std::size_t na = system.n_actions();
  if (policy.size() != ns * na) throw InvariantViolation("system policy does not match the system");
  std::vector<double> table(ns * na * ns, 0.0);
  for (StateIndex s = 0; s < ns; ++s) {
    for (ActionIndex a = 0; a < na; ++a) {
      const auto list = graph.successors(s, a);
      const auto row = policy.row(s * na + a);
      for (std::size_t k = 0; k < list.size(); ++k) table[(s * na + a) * ns + list[k]] = row[k];
    }
  }
  return system.with_transition(std::move(table));
}

}  // namespace iso
