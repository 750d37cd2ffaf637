#pragma once

#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

// Maximum-entropy trajectory model under a fixed system:
//   P(zeta | theta) = exp(sum_t theta[S_t]) * prod_t T(S_{t+1}|S_t,A_t) / Z_L(S_0)
// with one partition function per (trajectory length L, start state). The
// likelihood is undiscounted.

struct MaxEntOptions {
  double learning_rate = 0.05;
  std::size_t iterations = 300;
  /// Visitation recursion depth; must cover the longest trajectory.
  std::size_t horizon = 40;
  /// Divergence is declared when the gradient norm grows tenfold over this
  /// many iterations.
  std::size_t divergence_window = 20;
};

/// d/dtheta of the mean log-likelihood: empirical minus model expected
/// feature counts, each averaged per trajectory.
std::vector<double> maxent_gradient(const std::vector<double>& theta, const std::vector<Trajectory>& trajectories,
                                    const TabularSystem& system, std::size_t horizon);

/// Mean per-trajectory log-likelihood of the log under theta.
double maxent_log_likelihood(const std::vector<double>& theta, const std::vector<Trajectory>& trajectories,
                             const TabularSystem& system, std::size_t horizon);

/// log P(zeta | theta, S_0, |zeta|) for one trajectory.
double maxent_log_probability(const std::vector<double>& theta, const Trajectory& trajectory,
                              const TabularSystem& system);

struct MaxEntResult {
  RewardModel reward;
  std::vector<double> gradient_norms;  ///< one entry per iteration
};

/// Gradient ascent from theta = 0. Throws LearningError on divergence.
MaxEntResult maxent_irl(const std::vector<Trajectory>& trajectories, const TabularSystem& system,
                        const MaxEntOptions& options = {});

}  // namespace iso
