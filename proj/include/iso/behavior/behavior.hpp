#pragma once

#include <cstdint>
#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

struct LengthRange {
  std::size_t min = 30;
  std::size_t max = 40;
};

/// `count` trajectories: S0 ~ D0, A ~ pi(.|S), S' ~ T(.|S,A), each with a
/// length drawn uniformly from `lengths`. Trajectory i uses its own stream
/// derived from (seed, i).
std::vector<Trajectory> sample_trajectories(const TabularSystem& system, const Policy& policy, std::size_t count,
                                            LengthRange lengths, std::uint64_t seed);

/// Deterministic policy on argmin_a pi(a|s), lowest index on ties.
Policy adversarial_policy(const Policy& policy);

/// Mix of behaviours (MB): ceil(nf * count) trajectories from the adversarial
/// policy and the rest from `optimal`, shuffled by seed when both are present.
std::vector<Trajectory> mix_behaviors(const TabularSystem& system, const Policy& optimal, double noise_factor,
                                      std::size_t count, LengthRange lengths, std::uint64_t seed);

/// Number of adversarial trajectories mix_behaviors emits.
std::size_t adversarial_count(double noise_factor, std::size_t count);

struct NoisyPolicy {
  Policy policy;
  /// Set when noise was requested on a single-action system; the input
  /// policy is then returned unchanged.
  bool degenerate = false;
};

/// Noise in behaviour (NB): per state, argmax with probability 1 - nf and a
/// uniform choice among the other actions with probability nf.
NoisyPolicy noisy_policy(const Policy& policy, double noise_factor);

/// psi(zeta) = sum_{t<|zeta|} gamma^t phi(S_t) with one-hot phi.
std::vector<double> accrued_features(const Trajectory& trajectory, std::size_t n_states, double gamma);

/// Copies of `trajectories` scored by theta^T psi(zeta).
std::vector<Trajectory> score_trajectories(const std::vector<Trajectory>& trajectories, const RewardModel& reward,
                                           double gamma);

}  // namespace iso
