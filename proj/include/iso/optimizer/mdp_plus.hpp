#pragma once

#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

/// The role-swapped MDP+: the system is the agent, composite states are user
/// (state, action) pairs, actions are next states restricted to the
/// connectivity graph, and the user policy supplies the dynamics:
///   T+((s',a') | (s,a), s') = pi(a'|s'),  r+((s,a)) = r(s),
///   D0+((s,a)) = D0(s) pi(a|s).
class ReformulatedMdp {
 public:
  ReformulatedMdp(const TabularSystem& system, const Policy& user_policy, const RewardModel& reward, double gamma);

  std::size_t n_states() const noexcept { return graph_->n_states(); }
  std::size_t n_actions() const noexcept { return graph_->n_actions(); }
  std::size_t n_composites() const noexcept { return n_states() * n_actions(); }

  std::size_t composite(StateIndex s, ActionIndex a) const noexcept { return s * n_actions() + a; }
  StateIndex state_of(std::size_t composite) const noexcept { return composite / n_actions(); }
  ActionIndex action_of(std::size_t composite) const noexcept { return composite % n_actions(); }

  /// Allowed system actions (next original states) at a composite state.
  std::span<const StateIndex> actions(std::size_t composite) const {
    return graph_->successors(state_of(composite), action_of(composite));
  }

  /// T+(next_composite | composite, next_state); zero unless the next
  /// composite's state component equals the chosen next state.
  double transition(std::size_t composite, StateIndex next_state, std::size_t next_composite) const;

  double reward(std::size_t composite) const { return reward_[state_of(composite)]; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<double>& initial_distribution() const noexcept { return initial_; }
  const Policy& user_policy() const noexcept { return user_; }
  const Connectivity& connectivity() const noexcept { return *graph_; }

 private:
  std::shared_ptr<const Connectivity> graph_;
  Policy user_;
  std::vector<double> reward_;
  std::vector<double> initial_;
  double gamma_;
};

/// A system policy pi+(s' | (s,a)) over composites; probabilities are aligned
/// with each composite's action list (its connectivity successors).
class SystemPolicy {
 public:
  SystemPolicy(const Connectivity& graph, std::vector<std::vector<double>> probs);

  std::span<const double> row(std::size_t composite) const { return probs_[composite]; }
  std::size_t size() const noexcept { return probs_.size(); }

 private:
  std::vector<std::vector<double>> probs_;
};

/// pi+ := T, reading the system's transition rows as a policy in MDP+.
SystemPolicy as_system_policy(const TabularSystem& system);

/// Composite values of a fixed system policy in MDP+ (Jacobi sweeps to the
/// given Bellman residual).
std::vector<double> mdp_plus_policy_value(const ReformulatedMdp& mdp, const SystemPolicy& policy,
                                          double residual = 1e-10);

/// sum_c D0+(c) V+(c).
double mdp_plus_expected_value(const ReformulatedMdp& mdp, const std::vector<double>& values);

struct MdpPlusSolution {
  SystemPolicy policy;         ///< deterministic greedy, lowest state index on ties
  std::vector<double> values;  ///< optimal V+ per composite
  double residual = 0.0;       ///< Bellman optimality residual of `values`
  std::size_t sweeps = 0;
};

/// Exact value iteration on MDP+ restricted to allowed actions.
MdpPlusSolution solve_mdp_plus(const ReformulatedMdp& mdp, double tolerance = 1e-10,
                               std::size_t max_sweeps = 1'000'000);

/// T*(s'|s,a) = pi+(s' | (s,a)); shares connectivity and D0 with `system`.
TabularSystem extract_transition(const SystemPolicy& policy, const TabularSystem& system);

}  // namespace iso
