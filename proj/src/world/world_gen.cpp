#include "iso/world/world_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iso/core/errors.hpp"
#include "iso/core/random.hpp"

namespace iso {
namespace {

// First k entries of a partial Fisher-Yates shuffle of 0..n-1.
std::vector<StateIndex> choose_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<StateIndex> pool(n);
  std::iota(pool.begin(), pool.end(), StateIndex{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n - i));
    std::swap(pool[i], pool[std::min(j, n - 1)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

void WorldConfig::validate() const {
  if (n_states == 0) throw ConfigError("n_states must be positive");
  if (n_actions == 0) throw ConfigError("n_actions must be positive");
  if (connection_factor < 1 || connection_factor > n_states) {
    throw ConfigError("connection_factor must lie in [1, n_states]");
  }
  if (!(reward_fraction > 0.0 && reward_fraction < 1.0)) throw ConfigError("reward_fraction must lie in (0, 1)");
}

std::shared_ptr<const Connectivity> sample_connectivity(const WorldConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, stream::kConnectivity);
  std::vector<std::vector<StateIndex>> successors;
  successors.reserve(config.n_states * config.n_actions);
  for (std::size_t i = 0; i < config.n_states * config.n_actions; ++i) {
    auto list = choose_without_replacement(config.n_states, config.connection_factor, rng);
    std::sort(list.begin(), list.end());
    successors.push_back(std::move(list));
  }
  return std::make_shared<const Connectivity>(config.n_states, config.n_actions, std::move(successors));
}

std::vector<double> sample_transition_table(const Connectivity& graph, std::uint64_t seed) {
  Rng rng = make_rng(seed, stream::kTransition);
  const std::size_t ns = graph.n_states();
  std::vector<double> table(ns * graph.n_actions() * ns, 0.0);
  for (StateIndex s = 0; s < ns; ++s) {
    for (ActionIndex a = 0; a < graph.n_actions(); ++a) {
      const auto list = graph.successors(s, a);
      const auto weights = sample_simplex(list.size(), rng);
      double* row = table.data() + (s * graph.n_actions() + a) * ns;
      for (std::size_t k = 0; k < list.size(); ++k) row[list[k]] = weights[k];
    }
  }
  return table;
}

TabularSystem sample_system(const WorldConfig& config) {
  auto graph = sample_connectivity(config);
  auto table = sample_transition_table(*graph, config.seed);
  Rng rng = make_rng(config.seed, stream::kInitial);
  auto d0 = sample_simplex(config.n_states, rng);
  return TabularSystem(std::move(graph), std::move(table), std::move(d0));
}

RewardModel sample_reward(const WorldConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed, stream::kReward);
  const auto n_rewarded =
      static_cast<std::size_t>(std::lround(config.reward_fraction * static_cast<double>(config.n_states)));
  std::vector<double> theta(config.n_states, 0.0);
  for (StateIndex s : choose_without_replacement(config.n_states, n_rewarded, rng)) theta[s] = 1.0;
  return RewardModel(std::move(theta));
}

World sample_world(const WorldConfig& config) { return World{config, sample_system(config), sample_reward(config)}; }

}  // namespace iso
