#pragma once

#include <vector>

#include "iso/mdp/types.hpp"

namespace iso {

struct DmIrlResult {
  RewardModel reward;
  std::size_t rank = 0;
  /// The accrued-feature design matrix did not have full column rank; the
  /// returned weights are the (ridge-approximated) minimum-norm solution.
  bool rank_deficient = false;
};

struct DmIrlOptions {
  double ridge = 1e-10;
  /// Eigenvalues of the Gram matrix below this fraction of the largest one
  /// count as zero when reporting rank.
  double rank_tolerance = 1e-12;
};

/// Least-squares regression of trajectory scores onto discounted accrued
/// features psi(zeta). Every trajectory must carry a score.
DmIrlResult dm_irl(const std::vector<Trajectory>& scored, std::size_t n_states, double gamma,
                   const DmIrlOptions& options = {});

}  // namespace iso
