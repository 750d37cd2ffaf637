#include "iso/world/world_io.hpp"

#include <fstream>

#include "iso/core/errors.hpp"

namespace iso {

using nlohmann::json;

json to_json(const WorldConfig& config) {
  return json{{"n_states", config.n_states},
              {"n_actions", config.n_actions},
              {"connection_factor", config.connection_factor},
              {"reward_fraction", config.reward_fraction},
              {"seed", config.seed}};
}

WorldConfig world_config_from_json(const json& j) {
  WorldConfig config;
  config.n_states = j.value("n_states", config.n_states);
  config.n_actions = j.value("n_actions", config.n_actions);
  config.connection_factor = j.value("connection_factor", config.connection_factor);
  config.reward_fraction = j.value("reward_fraction", config.reward_fraction);
  config.seed = j.value("seed", config.seed);
  config.validate();
  return config;
}

json to_json(const TabularSystem& system) {
  const auto& graph = system.connectivity();
  json connectivity = json::array();
  json rows = json::array();
  for (StateIndex s = 0; s < system.n_states(); ++s) {
    for (ActionIndex a = 0; a < system.n_actions(); ++a) {
      const auto list = graph.successors(s, a);
      json probs = json::array();
      for (StateIndex next : list) probs.push_back(system.transition(s, a, next));
      connectivity.push_back(std::vector<StateIndex>(list.begin(), list.end()));
      rows.push_back(std::move(probs));
    }
  }
  return json{{"n_states", system.n_states()},
              {"n_actions", system.n_actions()},
              {"connectivity", std::move(connectivity)},
              {"transition", std::move(rows)},
              {"initial_dist", system.initial_distribution()}};
}

TabularSystem system_from_json(const json& j) {
  const auto ns = j.at("n_states").get<std::size_t>();
  const auto na = j.at("n_actions").get<std::size_t>();
  auto lists = j.at("connectivity").get<std::vector<std::vector<StateIndex>>>();
  const auto rows = j.at("transition").get<std::vector<std::vector<double>>>();
  if (rows.size() != lists.size()) throw InvariantViolation("transition rows do not match connectivity");
  std::vector<double> table(ns * na * ns, 0.0);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    if (rows[i].size() != lists[i].size()) throw InvariantViolation("transition row does not match its successors");
    for (std::size_t k = 0; k < lists[i].size(); ++k) {
      if (lists[i][k] >= ns) throw InvariantViolation("successor index out of range");
      table[i * ns + lists[i][k]] = rows[i][k];
    }
  }
  auto graph = std::make_shared<const Connectivity>(ns, na, std::move(lists));
  return TabularSystem(std::move(graph), std::move(table), j.at("initial_dist").get<std::vector<double>>());
}

json to_json(const World& world) {
  json j = to_json(world.system);
  j["format"] = kWorldFormat;
  j["version"] = kWorldFormatVersion;
  j["config"] = to_json(world.config);
  j["reward"] = world.reward.weights();
  return j;
}

World world_from_json(const json& j) {
  if (j.value("format", std::string{}) != kWorldFormat) throw InvariantViolation("not an iso-world document");
  if (j.value("version", 0) != kWorldFormatVersion) throw InvariantViolation("unsupported iso-world version");
  return World{world_config_from_json(j.at("config")), system_from_json(j),
               RewardModel(j.at("reward").get<std::vector<double>>())};
}

void save_world(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(world).dump(1) << '\n';
}

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return world_from_json(json::parse(in));
}

}  // namespace iso
