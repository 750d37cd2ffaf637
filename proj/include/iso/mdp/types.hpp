#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace iso {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Row sums and entries of stochastic objects are checked against this.
inline constexpr double kStochasticTolerance = 1e-9;

/// Allowed next states per (state, action), each list sorted ascending and
/// free of duplicates. Shared between systems that differ only in their
/// transition table.
class Connectivity {
 public:
  Connectivity(std::size_t n_states, std::size_t n_actions,
               std::vector<std::vector<StateIndex>> successors);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }

  std::span<const StateIndex> successors(StateIndex s, ActionIndex a) const {
    return successors_[s * n_actions_ + a];
  }
  bool allows(StateIndex s, ActionIndex a, StateIndex next) const;

  /// Largest successor-list size.
  std::size_t max_degree() const noexcept { return max_degree_; }

  bool operator==(const Connectivity& other) const = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::size_t max_degree_ = 0;
  std::vector<std::vector<StateIndex>> successors_;
};

/// The interactive system: fixed connectivity graph, mutable transition
/// distribution T[s][a][s'], and an initial-state distribution. State features
/// are one-hot.
class TabularSystem {
 public:
  TabularSystem(std::shared_ptr<const Connectivity> connectivity, std::vector<double> transition,
                std::vector<double> initial_dist);

  std::size_t n_states() const noexcept { return graph_->n_states(); }
  std::size_t n_actions() const noexcept { return graph_->n_actions(); }

  const Connectivity& connectivity() const noexcept { return *graph_; }
  const std::shared_ptr<const Connectivity>& shared_connectivity() const noexcept { return graph_; }

  double transition(StateIndex s, ActionIndex a, StateIndex next) const {
    return transition_[(s * n_actions() + a) * n_states() + next];
  }
  /// Dense row T[s][a][·] of length n_states.
  std::span<const double> transition_row(StateIndex s, ActionIndex a) const {
    return {transition_.data() + (s * n_actions() + a) * n_states(), n_states()};
  }
  const std::vector<double>& transition_table() const noexcept { return transition_; }
  const std::vector<double>& initial_distribution() const noexcept { return initial_; }

  /// One-hot feature vector phi(s).
  std::vector<double> features(StateIndex s) const;

  /// Returns a copy sharing this system's connectivity and D0 with a new
  /// transition table; the table is validated against the graph.
  TabularSystem with_transition(std::vector<double> transition) const;

 private:
  void validate() const;

  std::shared_ptr<const Connectivity> graph_;
  std::vector<double> transition_;
  std::vector<double> initial_;
};

/// Linear reward over one-hot features: r(s) = theta[s].
class RewardModel {
 public:
  RewardModel() = default;
  explicit RewardModel(std::vector<double> weights);

  static RewardModel zeros(std::size_t n_states) { return RewardModel(std::vector<double>(n_states, 0.0)); }

  double operator()(StateIndex s) const { return weights_[s]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }

  /// Min-max rescaled copy in [0, 1]; a constant reward maps to all zeros.
  RewardModel normalized() const;

 private:
  std::vector<double> weights_;
};

/// Stochastic user policy pi[s][a].
class Policy {
 public:
  Policy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);

  static Policy uniform(std::size_t n_states, std::size_t n_actions);
  /// One-hot policy selecting choice[s] in every state.
  static Policy deterministic(std::size_t n_actions, std::span<const ActionIndex> choice);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double operator()(StateIndex s, ActionIndex a) const { return probs_[s * n_actions_ + a]; }
  std::span<const double> row(StateIndex s) const { return {probs_.data() + s * n_actions_, n_actions_}; }
  const std::vector<double>& table() const noexcept { return probs_; }

  /// Highest-probability action, lowest index on ties.
  ActionIndex argmax(StateIndex s) const;
  /// Lowest-probability action, lowest index on ties.
  ActionIndex argmin(StateIndex s) const;

  bool operator==(const Policy& other) const = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> probs_;
};

struct Step {
  StateIndex state;
  ActionIndex action;
  bool operator==(const Step&) const = default;
};

/// Alternating state/action sequence S0, A0, S1, A1, ...; optionally scored.
struct Trajectory {
  std::vector<Step> steps;
  std::optional<double> score;

  std::size_t size() const noexcept { return steps.size(); }
  bool operator==(const Trajectory&) const = default;
};

/// Throws InvariantViolation unless every consecutive (s_t, a_t, s_{t+1}) is
/// allowed by the graph and all indices are in range.
void check_feasible(const Trajectory& trajectory, const Connectivity& graph);

/// Throws InvariantViolation unless the policy matches the system's shape.
void check_compatible(const TabularSystem& system, const Policy& policy);
void check_compatible(const TabularSystem& system, const RewardModel& reward);

}  // namespace iso
