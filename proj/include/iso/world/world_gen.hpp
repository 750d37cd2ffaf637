#pragma once

#include <cstdint>
#include <memory>

#include "iso/mdp/types.hpp"

namespace iso {

struct WorldConfig {
  std::size_t n_states = 64;
  std::size_t n_actions = 4;
  std::size_t connection_factor = 8;
  double reward_fraction = 0.25;
  std::uint64_t seed = 0;

  /// Throws ConfigError on any invalid field.
  void validate() const;
  bool operator==(const WorldConfig&) const = default;
};

/// For every (s, a): `connection_factor` distinct successors drawn uniformly
/// without replacement. Depends on the seed only.
std::shared_ptr<const Connectivity> sample_connectivity(const WorldConfig& config);

/// Dirichlet(1) rows over each successor list, drawn from `seed`.
std::vector<double> sample_transition_table(const Connectivity& graph, std::uint64_t seed);

/// Random interactive system: graph, transition rows and D0 all from the seed.
TabularSystem sample_system(const WorldConfig& config);

/// round(reward_fraction * n_states) states get reward 1, the rest 0.
RewardModel sample_reward(const WorldConfig& config);

/// A sampled system together with its true reward.
struct World {
  WorldConfig config;
  TabularSystem system;
  RewardModel reward;
};

World sample_world(const WorldConfig& config);

}  // namespace iso
