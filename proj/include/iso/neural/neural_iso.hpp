#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iso/neural/airl.hpp"

namespace iso::neural {

/// Where the MDP+ reward and the MDP+ user come from.
enum class Source { Oracle, Airl };

struct Setup {
  Source reward = Source::Oracle;
  Source user = Source::Oracle;

  static Setup parse(const std::string& text);  ///< "oracle-oracle", "airl-oracle", "airl-airl"
  std::string name() const;
  bool uses_airl() const { return reward == Source::Airl || user == Source::Airl; }
};

struct NeuralIsoConfig {
  NeuralConfig world;
  Setup setup;
  double lambda_kl = 0.001;
  std::size_t iterations = 3;
  std::size_t expert_trajectories = 20000;
  std::size_t eval_trajectories = 1000;
  /// Environment steps per PPO training call.
  std::size_t user_steps = 40960;
  std::size_t system_steps = 122880;
  AirlOptions airl;
  PpoOptions ppo;

  void validate() const;
};

nlohmann::json to_json(const NeuralIsoConfig& config);
NeuralIsoConfig neural_config_from_json(const nlohmann::json& j);

struct ReturnEstimate {
  double mean = 0.0;
  double sem = 0.0;
};

/// Trains a user policy by PPO on the frozen system, warm-started from `user`.
Mlp train_user(const NeuralSystem& system, const RewardFn& reward, Mlp user, std::size_t steps,
               const PpoOptions& options, std::uint64_t seed);

/// Mean undiscounted return (and its standard error) of `user` over
/// n_trajectories episodes on the system.
ReturnEstimate average_return(const NeuralSystem& system, const RewardFn& reward, const Mlp& user,
                              std::size_t n_trajectories, std::uint64_t seed);

/// Trains an oracle user under `reward` first, then measures it.
ReturnEstimate evaluate_average_return(const NeuralSystem& system, const RewardFn& reward,
                                       std::size_t n_trajectories, const NeuralConfig& config, std::size_t user_steps,
                                       const PpoOptions& options, std::uint64_t seed);

struct SystemOptimization {
  NeuralSystem system;
  std::vector<UpdateStats> curve;
  double mean_kl = 0.0;  ///< per-step KL to the starting system on a fresh rollout
};

/// PPO on the system policy in the role-swapped MDP with per-step reward
/// r(s) - lambda * KL(current || start). The start system is frozen on entry.
SystemOptimization optimize_system_neural(const NeuralSystem& system, const RewardFn& reward, const Mlp& user,
                                          double lambda_kl, std::size_t steps, const PpoOptions& options,
                                          std::uint64_t seed);

/// Mean per-step KL(current || reference) along episodes of the role-swapped MDP.
double mean_system_kl(const NeuralSystem& current, const NeuralSystem& reference, const Mlp& user,
                      const RewardFn& reward, std::size_t episodes, std::uint64_t seed);

struct NeuralIterationRecord {
  std::size_t iteration = 0;
  double mean_return = 0.0;
  double sem = 0.0;
  double system_kl = 0.0;
  std::optional<double> discriminator_accuracy;
  double wall_ms = 0.0;
};

struct NeuralRun {
  std::vector<NeuralIterationRecord> records;
  NeuralSystem system;
  Mlp user;
};

/// Iteration 0 evaluates the random system; each later iteration trains the
/// oracle user, collects expert episodes, optionally runs AIRL, optimizes the
/// system and evaluates it with a retrained oracle user.
NeuralRun run_iso_neural(const NeuralIsoConfig& config);

}  // namespace iso::neural
