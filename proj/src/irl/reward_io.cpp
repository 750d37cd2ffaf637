#include "iso/irl/reward_io.hpp"

#include <cstdio>

#include "iso/behavior/trajectory_io.hpp"

namespace iso {

std::string log_identity_hash(const std::vector<Trajectory>& trajectories) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    for (unsigned char c : format_trajectory(i, trajectories[i]) + "\n") {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const RewardRecord& record) {
  return nlohmann::json{{"iteration", record.iteration},
                        {"method", record.method},
                        {"hyperparameters", record.hyperparameters},
                        {"log_hash", record.log_hash},
                        {"theta", record.reward.weights()}};
}

RewardRecord reward_record_from_json(const nlohmann::json& j) {
  RewardRecord record;
  record.iteration = j.at("iteration").get<std::size_t>();
  record.method = j.at("method").get<std::string>();
  record.hyperparameters = j.value("hyperparameters", nlohmann::json::object());
  record.log_hash = j.value("log_hash", std::string{});
  record.reward = RewardModel(j.at("theta").get<std::vector<double>>());
  return record;
}

}  // namespace iso
