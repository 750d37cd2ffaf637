#include "iso/neural/checkpoint.hpp"

#include <cstdio>
#include <fstream>

namespace iso::neural {

nlohmann::json to_json(const Mlp& net) {
  const auto& p = net.params();
  return {{"sizes", net.sizes()},
          {"activation", net.n_layers() > 1 && net.activation(0) == Activation::Identity ? "identity" : "tanh"},
          {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  try {
    const auto act = j.value("activation", std::string("tanh"));
    if (act != "tanh" && act != "identity") throw ConfigError("unknown activation '" + act + "'");
    Mlp net(j.at("sizes").get<std::vector<std::size_t>>(), act == "tanh" ? Activation::Tanh : Activation::Identity);
    const auto params = j.at("params").get<std::vector<double>>();
    net.set_params(Eigen::Map<const VectorXd>(params.data(), static_cast<Eigen::Index>(params.size())));
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network: ") + e.what());
  }
}

std::string config_hash(const NeuralIsoConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(config).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  nlohmann::json j{{"format", "iso-neural-checkpoint"},
                   {"version", 1},
                   {"config_hash", checkpoint.config_hash},
                   {"iteration", checkpoint.iteration},
                   {"state_dim", checkpoint.system.state_dim},
                   {"n_actions", checkpoint.system.n_actions},
                   {"system", to_json(checkpoint.system.net)},
                   {"user", to_json(checkpoint.user)}};
  if (checkpoint.airl_reward) j["airl_reward"] = to_json(*checkpoint.airl_reward);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::optional<std::string>& expected_hash) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.value("format", std::string{}) != "iso-neural-checkpoint") throw ConfigError("not a neural checkpoint");
  Checkpoint c;
  c.config_hash = j.value("config_hash", std::string{});
  if (expected_hash && *expected_hash != c.config_hash) {
    throw ConfigError("checkpoint config hash " + c.config_hash + " does not match " + *expected_hash);
  }
  c.iteration = j.at("iteration").get<std::size_t>();
  c.system.state_dim = j.at("state_dim").get<std::size_t>();
  c.system.n_actions = j.at("n_actions").get<std::size_t>();
  c.system.net = mlp_from_json(j.at("system"));
  if (c.system.net.input_size() != c.system.input_size() || c.system.net.output_size() != 2 * c.system.state_dim) {
    throw SizeError("checkpoint system network has the wrong shape");
  }
  c.user = mlp_from_json(j.at("user"));
  if (j.contains("airl_reward")) c.airl_reward = mlp_from_json(j.at("airl_reward"));
  return c;
}

}  // namespace iso::neural
