#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iso/behavior/behavior.hpp"
#include "iso/irl/maxent.hpp"
#include "iso/mdp/types.hpp"
#include "iso/world/world_gen.hpp"

namespace iso {

/// How the user-interaction log of each iteration is produced.
struct BehaviorType {
  enum class Kind { IrlLabelled, Optimal, MixOfBehaviors, NoisyBehavior };
  Kind kind = Kind::Optimal;
  double noise_factor = 0.0;

  /// "IRL-labelled", "Optimal", "SubOptimal-<nf>-MB" or "SubOptimal-<nf>-NB".
  static BehaviorType parse(const std::string& name);
  std::string name() const;
  bool operator==(const BehaviorType&) const = default;
};

enum class IrlMethod { Oracle, DmIrl, MaxEnt };

IrlMethod parse_irl_method(const std::string& name);
std::string to_string(IrlMethod method);

struct IsoOptions {
  double gamma = 0.9;
  std::size_t trajectories = 2'000;
  LengthRange lengths{30, 40};
  MaxEntOptions maxent{};
  /// Min-max rescale recovered rewards to [0, 1] before optimizing.
  bool normalize_reward = true;
  double mdp_plus_tolerance = 1e-10;
};

struct IsoStep {
  TabularSystem system;  ///< with the optimized transition distribution
  Policy user_policy;    ///< user re-optimized on the new system under the true reward
  double quality = 0.0;  ///< expected state value of that user under the true reward
  double mdp_plus_residual = 0.0;
};

/// Soft-optimal user policy on `system` for `reward`.
Policy optimal_user_policy(const TabularSystem& system, const RewardModel& reward, double gamma);

/// D0-weighted optimal value under the true reward.
double system_quality(const TabularSystem& system, const RewardModel& truth, double gamma);

/// One pass of the optimizer: user policy by soft value iteration under
/// `reward`, MDP+ construction, exact solve, and transition extraction.
/// Quality is always evaluated under `truth`.
IsoStep iso_iteration(const TabularSystem& system, const RewardModel& reward, const RewardModel& truth,
                      double gamma, double mdp_plus_tolerance = 1e-10);

struct IterationDiagnostics {
  std::string log_hash;
  bool rank_deficient = false;
  std::optional<double> final_gradient_norm;
  double mdp_plus_residual = 0.0;
  double wall_ms = 0.0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::optional<RewardModel> recovered;  ///< absent for the initial record
  double quality = 0.0;
  IterationDiagnostics diagnostics;
};

/// Recovers theta from a log produced by `behavior` on `system`.
struct Recovery {
  RewardModel reward;
  IterationDiagnostics diagnostics;
};
Recovery recover_reward(const TabularSystem& system, const RewardModel& truth, const BehaviorType& behavior,
                        IrlMethod method, std::uint64_t log_seed, const IsoOptions& options);

/// Full outer loop on a freshly sampled world. Record 0 carries the initial
/// quality; records 1..n follow each recover-and-optimize iteration.
std::vector<IterationRecord> run_iso(const WorldConfig& world, const BehaviorType& behavior, IrlMethod method,
                                     std::size_t n_iterations, std::uint64_t seed, const IsoOptions& options = {});

/// Same loop starting from an explicit system and true reward.
std::vector<IterationRecord> run_iso(const TabularSystem& system, const RewardModel& truth,
                                     const BehaviorType& behavior, IrlMethod method, std::size_t n_iterations,
                                     std::uint64_t seed, const IsoOptions& options = {});

}  // namespace iso
