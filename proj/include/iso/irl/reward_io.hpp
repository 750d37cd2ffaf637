#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "iso/mdp/types.hpp"

namespace iso {

/// A recovered reward with the provenance needed to audit it.
struct RewardRecord {
  std::size_t iteration = 0;
  std::string method;
  nlohmann::json hyperparameters = nlohmann::json::object();
  std::string log_hash;  ///< identity of the trajectory log it was fit to
  RewardModel reward;
};

/// FNV-1a over the serialized log, as 16 hex digits.
std::string log_identity_hash(const std::vector<Trajectory>& trajectories);

nlohmann::json to_json(const RewardRecord& record);
RewardRecord reward_record_from_json(const nlohmann::json& j);

}  // namespace iso
