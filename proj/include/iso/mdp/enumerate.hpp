#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

/// Exhaustive enumeration is refused above this many trajectories.
inline constexpr double kMaxEnumeratedTrajectories = 1e6;

/// Number of graph-feasible state/action sequences with `length` states
/// (each step carries an action, including the last one).
double count_feasible(const Connectivity& graph, std::span<const StateIndex> starts, std::size_t length);

/// Calls `visit` for every graph-feasible trajectory of exactly `length`
/// states beginning in one of `starts`, in lexicographic order. Throws
/// SizeError above kMaxEnumeratedTrajectories.
void for_each_feasible(const Connectivity& graph, std::span<const StateIndex> starts, std::size_t length,
                       const std::function<void(const Trajectory&)>& visit);

struct EnumeratedReturn {
  Trajectory trajectory;
  double weight;         ///< probability under D0 (or the fixed start), pi and T
  double discounted;     ///< sum_t gamma^t r(S_t)
};

/// Every feasible trajectory of `horizon` states with its probability weight
/// and discounted return. With `start`, weights are conditional on S0 = start;
/// otherwise they include D0.
std::vector<EnumeratedReturn> enumerate_returns(const TabularSystem& system, const Policy& policy,
                                                const RewardModel& reward, double gamma, std::size_t horizon,
                                                std::optional<StateIndex> start = std::nullopt);

}  // namespace iso
