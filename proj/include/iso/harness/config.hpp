#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "iso/neural/neural_iso.hpp"
#include "iso/optimizer/iso.hpp"

namespace iso::harness {

enum class Mode { Tabular, Neural };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::Tabular;
  WorldConfig world;  ///< seed unused: each replica derives its own
  BehaviorType behavior;
  IrlMethod irl_method = IrlMethod::MaxEnt;
  IsoOptions iso;
  neural::NeuralIsoConfig neural;  ///< seed and iterations are set per run
  std::size_t n_iterations = 30;
  std::size_t n_replicas = 10;
  std::uint64_t base_seed = 0;
  std::string output = "results.csv";
  /// When false, wall_ms is written as 0 so identical runs give identical files.
  bool record_timing = true;
  /// Neural mode: final networks of each replica are saved here when set.
  std::string checkpoint_dir;

  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

/// Seed of replica r; independent of the replica count.
std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t replica);

/// FNV-1a of the canonical JSON form.
std::string config_hash(const ExperimentConfig& config);

}  // namespace iso::harness
