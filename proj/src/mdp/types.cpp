#include "iso/mdp/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "iso/core/errors.hpp"

namespace iso {
namespace {

void check_distribution(std::span<const double> row, const std::string& what) {
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvariantViolation(what + " has a negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kStochasticTolerance) {
    throw InvariantViolation(what + " sums to " + std::to_string(total));
  }
}

}  // namespace

Connectivity::Connectivity(std::size_t n_states, std::size_t n_actions,
                           std::vector<std::vector<StateIndex>> successors)
    : n_states_(n_states), n_actions_(n_actions), successors_(std::move(successors)) {
  if (n_states == 0 || n_actions == 0) throw InvariantViolation("connectivity needs at least one state and action");
  if (successors_.size() != n_states * n_actions) {
    throw InvariantViolation("connectivity must list successors for every (state, action)");
  }
  for (const auto& list : successors_) {
    if (list.empty()) throw InvariantViolation("every (state, action) needs at least one successor");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] >= n_states) throw InvariantViolation("successor index out of range");
      if (i > 0 && list[i] <= list[i - 1]) throw InvariantViolation("successor lists must be strictly ascending");
    }
    max_degree_ = std::max(max_degree_, list.size());
  }
}

bool Connectivity::allows(StateIndex s, ActionIndex a, StateIndex next) const {
  const auto list = successors(s, a);
  return std::binary_search(list.begin(), list.end(), next);
}

TabularSystem::TabularSystem(std::shared_ptr<const Connectivity> connectivity, std::vector<double> transition,
                             std::vector<double> initial_dist)
    : graph_(std::move(connectivity)), transition_(std::move(transition)), initial_(std::move(initial_dist)) {
  if (!graph_) throw InvariantViolation("system needs a connectivity graph");
  validate();
}

void TabularSystem::validate() const {
  const std::size_t ns = n_states();
  const std::size_t na = n_actions();
  if (transition_.size() != ns * na * ns) throw InvariantViolation("transition table has the wrong size");
  if (initial_.size() != ns) throw InvariantViolation("initial distribution has the wrong size");
  for (StateIndex s = 0; s < ns; ++s) {
    for (ActionIndex a = 0; a < na; ++a) {
      const auto row = transition_row(s, a);
      check_distribution(row, "transition row (" + std::to_string(s) + "," + std::to_string(a) + ")");
      for (StateIndex next = 0; next < ns; ++next) {
        if (row[next] > 0.0 && !graph_->allows(s, a, next)) {
          throw InvariantViolation("transition (" + std::to_string(s) + "," + std::to_string(a) + ") -> " +
                                   std::to_string(next) + " leaves the connectivity graph");
        }
      }
    }
  }
  check_distribution(initial_, "initial distribution");
}

std::vector<double> TabularSystem::features(StateIndex s) const {
  std::vector<double> phi(n_states(), 0.0);
  phi.at(s) = 1.0;
  return phi;
}

TabularSystem TabularSystem::with_transition(std::vector<double> transition) const {
  return TabularSystem(graph_, std::move(transition), initial_);
}

RewardModel::RewardModel(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InvariantViolation("reward weights must be finite");
  }
}

RewardModel RewardModel::normalized() const {
  if (weights_.empty()) return *this;
  const auto [lo, hi] = std::minmax_element(weights_.begin(), weights_.end());
  const double span = *hi - *lo;
  std::vector<double> out(weights_.size(), 0.0);
  if (span > 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (weights_[i] - *lo) / span;
  }
  return RewardModel(std::move(out));
}

Policy::Policy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
    : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
  if (probs_.size() != n_states * n_actions) throw InvariantViolation("policy table has the wrong size");
  for (StateIndex s = 0; s < n_states; ++s) check_distribution(row(s), "policy row " + std::to_string(s));
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
  return Policy(n_states, n_actions, std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)));
}

Policy Policy::deterministic(std::size_t n_actions, std::span<const ActionIndex> choice) {
  std::vector<double> probs(choice.size() * n_actions, 0.0);
  for (std::size_t s = 0; s < choice.size(); ++s) {
    if (choice[s] >= n_actions) throw InvariantViolation("deterministic policy action out of range");
    probs[s * n_actions + choice[s]] = 1.0;
  }
  return Policy(choice.size(), n_actions, std::move(probs));
}

ActionIndex Policy::argmax(StateIndex s) const {
  const auto r = row(s);
  return static_cast<ActionIndex>(std::max_element(r.begin(), r.end()) - r.begin());
}

ActionIndex Policy::argmin(StateIndex s) const {
  const auto r = row(s);
  return static_cast<ActionIndex>(std::min_element(r.begin(), r.end()) - r.begin());
}

void check_feasible(const Trajectory& trajectory, const Connectivity& graph) {
  const auto& steps = trajectory.steps;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (steps[t].state >= graph.n_states() || steps[t].action >= graph.n_actions()) {
      throw InvariantViolation("trajectory step " + std::to_string(t) + " is out of range");
    }
    if (t + 1 < steps.size() && !graph.allows(steps[t].state, steps[t].action, steps[t + 1].state)) {
      throw InvariantViolation("trajectory step " + std::to_string(t) + " leaves the connectivity graph");
    }
  }
}

void check_compatible(const TabularSystem& system, const Policy& policy) {
  if (policy.n_states() != system.n_states() || policy.n_actions() != system.n_actions()) {
    throw InvariantViolation("policy shape does not match the system");
  }
}

void check_compatible(const TabularSystem& system, const RewardModel& reward) {
  if (reward.size() != system.n_states()) throw InvariantViolation("reward length does not match the system");
}

}  // namespace iso
