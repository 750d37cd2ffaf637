#include "iso/irl/dm_irl.hpp"

#include <Eigen/Dense>

#include "iso/behavior/behavior.hpp"
#include "iso/core/errors.hpp"

namespace iso {

DmIrlResult dm_irl(const std::vector<Trajectory>& scored, std::size_t n_states, double gamma,
                   const DmIrlOptions& options) {
  if (n_states == 0) throw InvariantViolation("DM-IRL needs at least one state");
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n_states, n_states);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_states);
  for (const auto& trajectory : scored) {
    if (!trajectory.score) throw InvariantViolation("DM-IRL requires scored trajectories");
    const auto psi_vec = accrued_features(trajectory, n_states, gamma);
    const Eigen::Map<const Eigen::VectorXd> psi(psi_vec.data(), static_cast<Eigen::Index>(n_states));
    gram.selfadjointView<Eigen::Lower>().rankUpdate(psi);
    rhs += *trajectory.score * psi;
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().size() > 0 ? eig.eigenvalues().maxCoeff() : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (largest > 0.0 && eig.eigenvalues()[i] > options.rank_tolerance * largest) ++rank;
  }

  gram.diagonal().array() += options.ridge;
  const Eigen::VectorXd theta = gram.ldlt().solve(rhs);
  DmIrlResult result;
  result.reward = RewardModel(std::vector<double>(theta.data(), theta.data() + theta.size()));
  result.rank = rank;
  result.rank_deficient = rank < n_states;
  return result;
}

}  // namespace iso
