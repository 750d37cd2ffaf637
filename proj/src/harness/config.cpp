#include "iso/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "iso/core/errors.hpp"
#include "iso/core/random.hpp"

namespace iso::harness {
namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

Mode parse_mode(const std::string& text) {
  if (text == "tabular") return Mode::Tabular;
  if (text == "neural") return Mode::Neural;
  throw ConfigError("unknown mode '" + text + "' (expected tabular or neural)");
}

std::string to_string(Mode mode) { return mode == Mode::Tabular ? "tabular" : "neural"; }

void ExperimentConfig::validate() const {
  if (n_replicas == 0) throw ConfigError("n_replicas must be positive");
  if (output.empty()) throw ConfigError("output path must not be empty");
  if (mode == Mode::Tabular) {
    world.validate();
    if (!(iso.gamma > 0.0 && iso.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (iso.trajectories == 0) throw ConfigError("trajectories must be positive");
    if (iso.lengths.min == 0 || iso.lengths.min > iso.lengths.max) {
      throw ConfigError("trajectory lengths must satisfy 1 <= min <= max");
    }
    if (iso.lengths.max > iso.maxent.horizon) throw ConfigError("maximum trajectory length exceeds the MaxEnt horizon");
    if (!(iso.maxent.learning_rate > 0.0)) throw ConfigError("MaxEnt learning rate must be positive");
    const double nf = behavior.noise_factor;
    if (!(nf >= 0.0 && nf <= 1.0)) throw ConfigError("noise factor must lie in [0, 1]");
    if (behavior.kind == BehaviorType::Kind::IrlLabelled && irl_method == IrlMethod::MaxEnt) {
      throw ConfigError("IRL-labelled logs carry scores; use dm_irl or oracle");
    }
  } else {
    neural.validate();
  }
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j{{"mode", to_string(c.mode)},
                   {"n_iterations", c.n_iterations},
                   {"n_replicas", c.n_replicas},
                   {"base_seed", c.base_seed},
                   {"output", c.output},
                   {"record_timing", c.record_timing}};
  if (!c.checkpoint_dir.empty()) j["checkpoint_dir"] = c.checkpoint_dir;
  if (c.mode == Mode::Tabular) {
    j["world"] = {{"n_states", c.world.n_states},
                  {"n_actions", c.world.n_actions},
                  {"connection_factor", c.world.connection_factor},
                  {"reward_fraction", c.world.reward_fraction}};
    j["behavior"] = c.behavior.name();
    j["irl_method"] = to_string(c.irl_method);
    j["iso"] = {{"gamma", c.iso.gamma},
                {"trajectories", c.iso.trajectories},
                {"min_length", c.iso.lengths.min},
                {"max_length", c.iso.lengths.max},
                {"normalize_reward", c.iso.normalize_reward},
                {"mdp_plus_tolerance", c.iso.mdp_plus_tolerance},
                {"maxent",
                 {{"learning_rate", c.iso.maxent.learning_rate},
                  {"iterations", c.iso.maxent.iterations},
                  {"horizon", c.iso.maxent.horizon},
                  {"divergence_window", c.iso.maxent.divergence_window}}}};
  } else {
    auto n = neural::to_json(c.neural);
    n.erase("iterations");
    n["world"].erase("seed");
    j["neural"] = n;
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"mode", "n_iterations", "n_replicas", "base_seed", "output", "record_timing", "checkpoint_dir", "world", "behavior",
                  "irl_method", "iso", "neural"},
                 "experiment config");
  ExperimentConfig c;
  try {
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    c.n_iterations = j.value("n_iterations", c.n_iterations);
    c.n_replicas = j.value("n_replicas", c.n_replicas);
    c.base_seed = j.value("base_seed", c.base_seed);
    c.output = j.value("output", c.output);
    c.record_timing = j.value("record_timing", c.record_timing);
    c.checkpoint_dir = j.value("checkpoint_dir", c.checkpoint_dir);
    if (j.contains("world")) {
      const auto& w = j.at("world");
      reject_unknown(w, {"n_states", "n_actions", "connection_factor", "reward_fraction"}, "world");
      c.world.n_states = w.value("n_states", c.world.n_states);
      c.world.n_actions = w.value("n_actions", c.world.n_actions);
      c.world.connection_factor = w.value("connection_factor", c.world.connection_factor);
      c.world.reward_fraction = w.value("reward_fraction", c.world.reward_fraction);
    }
    if (j.contains("behavior")) c.behavior = BehaviorType::parse(j.at("behavior").get<std::string>());
    if (j.contains("irl_method")) c.irl_method = parse_irl_method(j.at("irl_method").get<std::string>());
    if (j.contains("iso")) {
      const auto& o = j.at("iso");
      reject_unknown(o,
                     {"gamma", "trajectories", "min_length", "max_length", "normalize_reward", "mdp_plus_tolerance",
                      "maxent"},
                     "iso");
      c.iso.gamma = o.value("gamma", c.iso.gamma);
      c.iso.trajectories = o.value("trajectories", c.iso.trajectories);
      c.iso.lengths.min = o.value("min_length", c.iso.lengths.min);
      c.iso.lengths.max = o.value("max_length", c.iso.lengths.max);
      c.iso.normalize_reward = o.value("normalize_reward", c.iso.normalize_reward);
      c.iso.mdp_plus_tolerance = o.value("mdp_plus_tolerance", c.iso.mdp_plus_tolerance);
      if (o.contains("maxent")) {
        const auto& m = o.at("maxent");
        reject_unknown(m, {"learning_rate", "iterations", "horizon", "divergence_window"}, "maxent");
        c.iso.maxent.learning_rate = m.value("learning_rate", c.iso.maxent.learning_rate);
        c.iso.maxent.iterations = m.value("iterations", c.iso.maxent.iterations);
        c.iso.maxent.horizon = m.value("horizon", c.iso.maxent.horizon);
        c.iso.maxent.divergence_window = m.value("divergence_window", c.iso.maxent.divergence_window);
      }
    }
    if (j.contains("neural")) c.neural = neural::neural_config_from_json(j.at("neural"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  c.neural.iterations = c.n_iterations;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << to_json(config).dump(2) << '\n';
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t replica) { return derive_seed(base_seed, replica); }

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace iso::harness
