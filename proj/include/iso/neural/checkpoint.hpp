#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "iso/neural/neural_iso.hpp"

namespace iso::neural {

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

/// FNV-1a of the canonical config JSON, as 16 hex digits.
std::string config_hash(const NeuralIsoConfig& config);

struct Checkpoint {
  std::string config_hash;
  std::size_t iteration = 0;
  NeuralSystem system;
  Mlp user;
  std::optional<Mlp> airl_reward;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws ConfigError if `expected_hash` is given and does not match.
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<std::string>& expected_hash = {});

}  // namespace iso::neural
