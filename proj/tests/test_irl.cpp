#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "iso/behavior/behavior.hpp"
#include "iso/core/errors.hpp"
#include "iso/irl/dm_irl.hpp"
#include "iso/irl/maxent.hpp"
#include "iso/irl/reward_io.hpp"
#include "iso/world/world_gen.hpp"
#include "support.hpp"

using namespace iso;
using namespace iso::test;

namespace {

double enumerated_log_likelihood(const std::vector<double>& theta, const TabularSystem& sys,
                                 const std::vector<Trajectory>& log) {
  const auto model = enumerated_model(theta, sys, log);
  std::vector<double> start_freq(sys.n_states(), 0.0);
  for (const auto& z : log) start_freq[z.steps.front().state] += 1.0 / static_cast<double>(log.size());
  double ll = 0.0;
  // The model mixes starts; condition on the observed start.
  for (const auto& z : log) ll += std::log(model.at(key_of(z.steps)) / start_freq[z.steps.front().state]);
  return ll / static_cast<double>(log.size());
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// 3 states, 2 actions, every successor reachable.
TabularSystem toy() { return random_dense(3, 2, 31); }

}  // namespace

TEST(MaxEnt, GradientMatchesFiniteDifferenceOfEnumeration) {
  const auto sys = toy();
  const auto log = sample_trajectories(sys, random_policy(3, 2, 2), 200, {3, 3}, 4);
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> theta(3);
    for (double& t : theta) t = 2.0 * uniform01(rng) - 1.0;
    const auto g = maxent_gradient(theta, log, sys, 3);
    std::vector<double> fd(3), diff(3);
    const double h = 1e-5;
    for (std::size_t k = 0; k < 3; ++k) {
      auto up = theta, down = theta;
      up[k] += h;
      down[k] -= h;
      fd[k] = (enumerated_log_likelihood(up, sys, log) - enumerated_log_likelihood(down, sys, log)) / (2 * h);
      diff[k] = g[k] - fd[k];
    }
    EXPECT_LT(norm(diff), 1e-4 * norm(fd));
    EXPECT_NEAR(maxent_log_likelihood(theta, log, sys, 3), enumerated_log_likelihood(theta, sys, log), 1e-10);
  }
}

TEST(MaxEnt, GradientWithMixedLengthsMatchesFiniteDifference) {
  const auto sys = toy();
  const auto log = sample_trajectories(sys, random_policy(3, 2, 2), 300, {2, 6}, 5);
  const std::vector<double> theta{0.3, -0.7, 0.2};
  const auto g = maxent_gradient(theta, log, sys, 8);
  const double h = 1e-5;
  for (std::size_t k = 0; k < 3; ++k) {
    auto up = theta, down = theta;
    up[k] += h;
    down[k] -= h;
    const double fd = (maxent_log_likelihood(up, log, sys, 8) - maxent_log_likelihood(down, log, sys, 8)) / (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST(MaxEnt, LearnedDistributionMatchesEnumeratedFit) {
  const auto sys = toy();
  const auto log = sample_trajectories(sys, random_policy(3, 2, 7), 500, {3, 3}, 8);
  MaxEntOptions opts;
  opts.horizon = 3;
  opts.iterations = 2000;
  opts.learning_rate = 0.5;
  const auto learned = maxent_irl(log, sys, opts);
  const auto reference = fit_by_enumeration(sys, log, 0.5, 4000);

  const auto model = enumerated_model(learned.reward.weights(), sys, log);
  EXPECT_LT(total_variation(model, enumerated_model(reference, sys, log)), 1e-3);

  // The recursion-based probabilities agree with enumeration under the learned theta.
  for (StateIndex s = 0; s < 3; ++s) {
    const auto e = enumerate_maxent(learned.reward.weights(), sys, s, 3);
    for (std::size_t i = 0; i < e.probs.size(); ++i)
      EXPECT_NEAR(std::exp(maxent_log_probability(learned.reward.weights(), e.trajectories[i], sys)), e.probs[i], 1e-12);
  }
  EXPECT_LT(learned.gradient_norms.back(), 1e-4);
  EXPECT_LT(norm(maxent_gradient(learned.reward.weights(), log, sys, 3)), 1e-4);
}

TEST(MaxEnt, UniformBehaviourOnSymmetricSystemGivesFlatTheta) {
  const std::size_t n = 4;
  const TabularSystem sys(complete_graph(n, 2), std::vector<double>(n * 2 * n, 1.0 / n), std::vector<double>(n, 1.0 / n));
  const auto log = sample_trajectories(sys, Policy::uniform(n, 2), 2000, {30, 40}, 3);
  const auto theta = maxent_irl(log, sys).reward.weights();
  const auto [lo, hi] = std::minmax_element(theta.begin(), theta.end());
  EXPECT_LT(*hi - *lo, 0.05);
}

TEST(MaxEnt, EqualRewardTrajectoriesAreEquallyLikely) {
  // 0 branches to 1 or 2 and both absorb.
  const auto sys = deterministic_system(3, 2, {1, 2, 1, 1, 2, 2}, {1.0, 0.0, 0.0});
  const std::vector<double> theta{0.4, 1.3, 1.3};
  const Trajectory a{{{0, 0}, {1, 0}, {1, 1}}, {}};
  const Trajectory b{{{0, 1}, {2, 1}, {2, 0}}, {}};
  EXPECT_NEAR(maxent_log_probability(theta, a, sys), maxent_log_probability(theta, b, sys), 1e-14);
}

TEST(MaxEnt, ShiftInvarianceAtFixedLength) {
  const auto sys = toy();
  const auto log = sample_trajectories(sys, Policy::uniform(3, 2), 20, {4, 4}, 1);
  const std::vector<double> theta{0.1, 0.9, -0.4};
  std::vector<double> shifted = theta;
  for (double& t : shifted) t += 2.5;
  for (const auto& z : log)
    EXPECT_NEAR(maxent_log_probability(theta, z, sys), maxent_log_probability(shifted, z, sys), 1e-12);
}

TEST(MaxEnt, SelfLoopCountsMatchLength) {
  // State 1 only loops on itself, so empirical and model counts are both the length.
  const auto sys = deterministic_system(2, 2, {0, 1, 1, 1}, {0.5, 0.5});
  const Trajectory z{{{1, 0}, {1, 1}, {1, 0}, {1, 0}, {1, 1}}, {}};
  EXPECT_EQ(accrued_features(z, 2, 1.0)[1], 5.0);
  const auto g = maxent_gradient({0.2, -0.1}, {z}, sys, 5);
  EXPECT_NEAR(g[0], 0.0, 1e-12);
  EXPECT_NEAR(g[1], 0.0, 1e-12);
}

TEST(MaxEnt, RejectsBadLogs) {
  const auto sys = toy();
  EXPECT_THROW(maxent_gradient({0, 0, 0}, {}, sys, 3), InvariantViolation);
  const Trajectory long_one{std::vector<Step>(5, Step{0, 0}), {}};
  EXPECT_THROW(maxent_gradient({0, 0, 0}, {long_one}, sys, 3), InvariantViolation);
  EXPECT_THROW(maxent_gradient({0, 0}, {long_one}, sys, 8), InvariantViolation);
}

TEST(DmIrl, RecoversTrueThetaOnFullRankLog) {
  const auto world = sample_world({.n_states = 16, .n_actions = 4, .connection_factor = 4, .seed = 2});
  const auto log = sample_trajectories(world.system, Policy::uniform(16, 4), 500, {30, 40}, 3);
  const auto result = dm_irl(score_trajectories(log, world.reward, 0.9), 16, 0.9);
  EXPECT_FALSE(result.rank_deficient);
  EXPECT_EQ(result.rank, 16u);
  for (std::size_t s = 0; s < 16; ++s) EXPECT_NEAR(result.reward(s), world.reward(s), 1e-6);
}

TEST(DmIrl, ZeroScoresGiveZeroTheta) {
  const auto sys = random_dense(4, 2, 3);
  const auto log = score_trajectories(sample_trajectories(sys, Policy::uniform(4, 2), 100, {5, 9}, 1),
                                      RewardModel::zeros(4), 0.9);
  const auto result = dm_irl(log, 4, 0.9);
  for (double w : result.reward.weights()) EXPECT_EQ(w, 0.0);
}

TEST(DmIrl, UnvisitedStatesGetZero) {
  // Hand-built log over {0, 1}: theta = (2, -1) exactly.
  std::vector<Trajectory> log{{{{0, 0}, {1, 0}}, {}}, {{{1, 0}, {1, 0}, {0, 0}}, {}}, {{{0, 0}}, {}}};
  const RewardModel truth({2.0, -1.0, 0.0, 0.0});
  log = score_trajectories(log, truth, 0.5);
  const auto result = dm_irl(log, 4, 0.5);
  EXPECT_TRUE(result.rank_deficient);
  EXPECT_EQ(result.rank, 2u);
  EXPECT_NEAR(result.reward(0), 2.0, 1e-6);
  EXPECT_NEAR(result.reward(1), -1.0, 1e-6);
  EXPECT_EQ(result.reward(2), 0.0);
  EXPECT_EQ(result.reward(3), 0.0);
}

TEST(DmIrl, LinearInScores) {
  const auto world = sample_world({.n_states = 8, .n_actions = 2, .connection_factor = 3, .seed = 4});
  auto log = score_trajectories(sample_trajectories(world.system, Policy::uniform(8, 2), 200, {10, 20}, 5),
                                world.reward, 0.9);
  const auto base = dm_irl(log, 8, 0.9).reward.weights();
  for (auto& z : log) *z.score *= 4.0;
  const auto scaled = dm_irl(log, 8, 0.9).reward.weights();
  for (std::size_t s = 0; s < 8; ++s) EXPECT_EQ(scaled[s], 4.0 * base[s]);
}

TEST(DmIrl, RequiresScores) {
  EXPECT_THROW(dm_irl({Trajectory{{{0, 0}}, {}}}, 2, 0.9), InvariantViolation);
}

TEST(RewardIo, RoundTripAndLogHash) {
  const auto sys = random_dense(3, 2, 1);
  const auto log = sample_trajectories(sys, Policy::uniform(3, 2), 10, {2, 4}, 1);
  RewardRecord rec;
  rec.iteration = 4;
  rec.method = "maxent";
  rec.hyperparameters = {{"learning_rate", 0.05}};
  rec.log_hash = log_identity_hash(log);
  rec.reward = RewardModel({0.1, 1.0 / 3.0, -2.0});
  const auto back = reward_record_from_json(nlohmann::json::parse(to_json(rec).dump()));
  EXPECT_EQ(back.iteration, 4u);
  EXPECT_EQ(back.method, "maxent");
  EXPECT_EQ(back.hyperparameters, rec.hyperparameters);
  EXPECT_EQ(back.log_hash, rec.log_hash);
  EXPECT_EQ(back.reward.weights(), rec.reward.weights());
  EXPECT_EQ(log_identity_hash(log), log_identity_hash(sample_trajectories(sys, Policy::uniform(3, 2), 10, {2, 4}, 1)));
  EXPECT_NE(log_identity_hash(log), log_identity_hash(sample_trajectories(sys, Policy::uniform(3, 2), 10, {2, 4}, 2)));
  EXPECT_EQ(rec.log_hash.size(), 16u);
}
