#include "iso/mdp/enumerate.hpp"

#include <numeric>
#include <string>

#include "iso/core/errors.hpp"
#include "iso/mdp/solvers.hpp"

namespace iso {

double count_feasible(const Connectivity& graph, std::span<const StateIndex> starts, std::size_t length) {
  if (length == 0) return 0.0;
  const std::size_t ns = graph.n_states();
  std::vector<double> count(ns, static_cast<double>(graph.n_actions()));
  std::vector<double> next(ns);
  for (std::size_t k = 1; k < length; ++k) {
    for (StateIndex s = 0; s < ns; ++s) {
      double acc = 0.0;
      for (ActionIndex a = 0; a < graph.n_actions(); ++a) {
        for (StateIndex t : graph.successors(s, a)) acc += count[t];
      }
      next[s] = acc;
    }
    count.swap(next);
  }
  double total = 0.0;
  for (StateIndex s : starts) total += count.at(s);
  return total;
}

namespace {

void extend(const Connectivity& graph, std::size_t length, Trajectory& current,
            const std::function<void(const Trajectory&)>& visit) {
  const StateIndex s = current.steps.back().state;
  for (ActionIndex a = 0; a < graph.n_actions(); ++a) {
    current.steps.back().action = a;
    if (current.steps.size() == length) {
      visit(current);
      continue;
    }
    for (StateIndex next : graph.successors(s, a)) {
      current.steps.push_back(Step{next, 0});
      extend(graph, length, current, visit);
      current.steps.pop_back();
    }
  }
}

}  // namespace

void for_each_feasible(const Connectivity& graph, std::span<const StateIndex> starts, std::size_t length,
                       const std::function<void(const Trajectory&)>& visit) {
  const double total = count_feasible(graph, starts, length);
  if (total > kMaxEnumeratedTrajectories) {
    throw SizeError("enumeration of " + std::to_string(total) + " trajectories exceeds the limit");
  }
  if (length == 0) return;
  for (StateIndex s : starts) {
    if (s >= graph.n_states()) throw InvariantViolation("start state out of range");
    Trajectory current;
    current.steps.push_back(Step{s, 0});
    extend(graph, length, current, visit);
  }
}

std::vector<EnumeratedReturn> enumerate_returns(const TabularSystem& system, const Policy& policy,
                                                const RewardModel& reward, double gamma, std::size_t horizon,
                                                std::optional<StateIndex> start) {
  check_compatible(system, policy);
  check_compatible(system, reward);
  std::vector<StateIndex> starts;
  if (start) {
    starts.push_back(*start);
  } else {
    starts.resize(system.n_states());
    std::iota(starts.begin(), starts.end(), StateIndex{0});
  }
  std::vector<EnumeratedReturn> out;
  for_each_feasible(system.connectivity(), starts, horizon, [&](const Trajectory& trajectory) {
    const auto& steps = trajectory.steps;
    double weight = start ? 1.0 : system.initial_distribution()[steps.front().state];
    for (std::size_t t = 0; t < steps.size(); ++t) {
      weight *= policy(steps[t].state, steps[t].action);
      if (t + 1 < steps.size()) weight *= system.transition(steps[t].state, steps[t].action, steps[t + 1].state);
    }
    out.push_back(EnumeratedReturn{trajectory, weight, discounted_return(trajectory, reward, gamma)});
  });
  return out;
}

}  // namespace iso
