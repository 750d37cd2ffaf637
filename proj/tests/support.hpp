#pragma once

// Small hand-built systems shared by the unit tests.

#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "iso/core/random.hpp"
#include "iso/mdp/enumerate.hpp"
#include "iso/mdp/types.hpp"
#include "iso/world/world_gen.hpp"

namespace iso::test {

inline std::shared_ptr<const Connectivity> complete_graph(std::size_t ns, std::size_t na) {
  std::vector<StateIndex> all(ns);
  for (std::size_t s = 0; s < ns; ++s) all[s] = s;
  return std::make_shared<const Connectivity>(ns, na, std::vector<std::vector<StateIndex>>(ns * na, all));
}

// Dense random system on the complete graph.
inline TabularSystem random_dense(std::size_t ns, std::size_t na, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> table;
  for (std::size_t i = 0; i < ns * na; ++i) {
    const auto row = sample_simplex(ns, rng);
    table.insert(table.end(), row.begin(), row.end());
  }
  return TabularSystem(complete_graph(ns, na), std::move(table), sample_simplex(ns, rng));
}

// Deterministic successor per (s, a): next[s * na + a].
inline TabularSystem deterministic_system(std::size_t ns, std::size_t na, const std::vector<StateIndex>& next,
                                          std::vector<double> d0) {
  std::vector<std::vector<StateIndex>> succ;
  std::vector<double> table(ns * na * ns, 0.0);
  for (std::size_t i = 0; i < ns * na; ++i) {
    succ.push_back({next[i]});
    table[i * ns + next[i]] = 1.0;
  }
  return TabularSystem(std::make_shared<const Connectivity>(ns, na, std::move(succ)), std::move(table),
                       std::move(d0));
}

inline Policy random_policy(std::size_t ns, std::size_t na, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> probs;
  for (std::size_t s = 0; s < ns; ++s) {
    const auto row = sample_simplex(na, rng);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Policy(ns, na, std::move(probs));
}

inline std::vector<double> row_sums(const std::vector<double>& table, std::size_t width) {
  std::vector<double> sums(table.size() / width, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) sums[i / width] += table[i];
  return sums;
}

// Exhaustive maximum-entropy distribution over trajectories of `length`
// states from `start`: P ~ exp(sum_t theta[S_t]) * prod_t T(S_t+1 | S_t, A_t).
struct Enumerated {
  std::vector<Trajectory> trajectories;
  std::vector<double> probs;
};

inline Enumerated enumerate_maxent(const std::vector<double>& theta, const TabularSystem& sys, StateIndex start,
                                   std::size_t length) {
  Enumerated out;
  const StateIndex starts[] = {start};
  double z = 0.0;
  for_each_feasible(sys.connectivity(), starts, length, [&](const Trajectory& t) {
    double w = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      w += theta[t.steps[i].state];
      if (i + 1 < t.size()) w += std::log(sys.transition(t.steps[i].state, t.steps[i].action, t.steps[i + 1].state));
    }
    if (!std::isfinite(w)) return;
    out.trajectories.push_back(t);
    out.probs.push_back(std::exp(w));
    z += std::exp(w);
  });
  for (double& p : out.probs) p /= z;
  return out;
}

using TrajectoryKey = std::vector<std::size_t>;

inline TrajectoryKey key_of(const std::vector<Step>& steps) {
  TrajectoryKey k;
  for (const auto& st : steps) {
    k.push_back(st.state);
    k.push_back(st.action);
  }
  return k;
}

// Model distribution over (start, trajectory) pairs with starts weighted by
// their frequency in `log` (all trajectories of one length).
inline std::map<TrajectoryKey, double> enumerated_model(const std::vector<double>& theta, const TabularSystem& sys,
                                                            const std::vector<Trajectory>& log) {
  std::vector<double> start_freq(sys.n_states(), 0.0);
  for (const auto& z : log) start_freq[z.steps.front().state] += 1.0 / static_cast<double>(log.size());
  std::map<TrajectoryKey, double> model;
  for (StateIndex s = 0; s < sys.n_states(); ++s) {
    if (start_freq[s] == 0.0) continue;
    const auto e = enumerate_maxent(theta, sys, s, log.front().size());
    for (std::size_t i = 0; i < e.probs.size(); ++i) model[key_of(e.trajectories[i].steps)] += start_freq[s] * e.probs[i];
  }
  return model;
}

inline double total_variation(const std::map<TrajectoryKey, double>& p, const std::map<TrajectoryKey, double>& q) {
  double tv = 0.0;
  for (const auto& [k, v] : p) {
    const auto it = q.find(k);
    tv += std::abs(v - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : q)
    if (!p.contains(k)) tv += std::abs(v);
  return 0.5 * tv;
}

// Reference fit by gradient ascent on the enumerated log-likelihood of a
// fixed-length log.
inline std::vector<double> fit_by_enumeration(const TabularSystem& sys, const std::vector<Trajectory>& log,
                                              double rate, std::size_t iterations) {
  const std::size_t ns = sys.n_states();
  std::vector<double> empirical(ns, 0.0);
  for (const auto& z : log)
    for (const auto& st : z.steps) empirical[st.state] += 1.0 / static_cast<double>(log.size());
  std::vector<double> theta(ns, 0.0);
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> grad = empirical;
    for (const auto& [k, p] : enumerated_model(theta, sys, log))
      for (std::size_t i = 0; i < k.size(); i += 2) grad[k[i]] -= p;
    for (std::size_t s = 0; s < ns; ++s) theta[s] += rate * grad[s];
  }
  return theta;
}

}  // namespace iso::test
