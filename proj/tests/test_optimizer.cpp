#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "iso/core/errors.hpp"
#include "iso/mdp/solvers.hpp"
#include "iso/optimizer/iso.hpp"
#include "iso/optimizer/mdp_plus.hpp"
#include "support.hpp"

using namespace iso;
using namespace iso::test;

namespace {

// Value of the best deterministic user policy, by exhaustive search.
double brute_force_quality(const TabularSystem& sys, const RewardModel& r, double gamma) {
  const std::size_t ns = sys.n_states(), na = sys.n_actions();
  std::size_t total = 1;
  for (std::size_t s = 0; s < ns; ++s) total *= na;
  double best = -1e300;
  std::vector<ActionIndex> choice(ns);
  for (std::size_t code = 0; code < total; ++code) {
    for (std::size_t s = 0, c = code; s < ns; ++s, c /= na) choice[s] = c % na;
    best = std::max(best, expected_state_value(sys, Policy::deterministic(na, choice), r, gamma));
  }
  return best;
}

void expect_valid(const TabularSystem& sys, const Connectivity& graph) {
  for (StateIndex s = 0; s < sys.n_states(); ++s)
    for (ActionIndex a = 0; a < sys.n_actions(); ++a) {
      const auto row = sys.transition_row(s, a);
      EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
      for (StateIndex t = 0; t < sys.n_states(); ++t) {
        EXPECT_TRUE(row[t] == 0.0 || graph.allows(s, a, t));
      }
    }
}

}  // namespace

TEST(MdpPlus, Dimensions) {
  const auto world = sample_world({.seed = 1});
  const ReformulatedMdp mdp(world.system, Policy::uniform(64, 4), world.reward, 0.9);
  EXPECT_EQ(mdp.n_composites(), 256u);
  for (std::size_t c = 0; c < mdp.n_composites(); ++c) {
    EXPECT_FALSE(mdp.actions(c).empty());
    EXPECT_EQ(mdp.reward(c), world.reward(mdp.state_of(c)));
  }
}

TEST(MdpPlus, TransitionsComeFromUserPolicy) {
  const auto sys = sample_system({.n_states = 6, .n_actions = 3, .connection_factor = 3, .seed = 2});
  const ReformulatedMdp uniform(sys, Policy::uniform(6, 3), RewardModel::zeros(6), 0.9);
  const auto pi = random_policy(6, 3, 4);
  const ReformulatedMdp mdp(sys, pi, RewardModel::zeros(6), 0.9);
  for (std::size_t c = 0; c < mdp.n_composites(); ++c)
    for (StateIndex next : mdp.actions(c)) {
      double total = 0.0;
      for (std::size_t c2 = 0; c2 < mdp.n_composites(); ++c2) {
        const double p = mdp.transition(c, next, c2);
        total += p;
        if (mdp.state_of(c2) != next) {
          EXPECT_EQ(p, 0.0);
        } else {
          EXPECT_EQ(p, pi(next, mdp.action_of(c2)));
          EXPECT_EQ(uniform.transition(c, next, c2), 1.0 / 3.0);
        }
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  double d0 = 0.0;
  for (double p : mdp.initial_distribution()) d0 += p;
  EXPECT_NEAR(d0, 1.0, 1e-9);
}

TEST(MdpPlus, ValueEquivalenceWithOriginalMdp) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t ns = 2 + seed % 5, na = 1 + seed % 3;
    const auto sys = sample_system({.n_states = ns, .n_actions = na, .connection_factor = 1 + seed % ns, .seed = seed});
    const auto pi = random_policy(ns, na, seed + 1000);
    Rng rng(seed);
    const RewardModel r(sample_simplex(ns, rng));
    const ReformulatedMdp mdp(sys, pi, r, 0.9);
    const double plus = mdp_plus_expected_value(mdp, mdp_plus_policy_value(mdp, as_system_policy(sys), 1e-12));
    EXPECT_NEAR(plus, expected_state_value(sys, pi, r, 0.9, 1e-12), 1e-8);
  }
}

TEST(MdpPlus, ConstantRewardGivesConstantValue) {
  const auto sys = sample_system({.n_states = 5, .n_actions = 2, .connection_factor = 2, .seed = 3});
  const ReformulatedMdp mdp(sys, random_policy(5, 2, 1), RewardModel(std::vector<double>(5, 0.3)), 0.9);
  for (double v : solve_mdp_plus(mdp).values) EXPECT_NEAR(v, 3.0, 1e-8);
}

TEST(MdpPlus, RoutesToRewardingState) {
  auto graph = complete_graph(2, 2);
  const TabularSystem sys(graph, std::vector<double>(8, 0.5), {0.5, 0.5});
  const RewardModel r({0.0, 1.0});
  const ReformulatedMdp mdp(sys, Policy::uniform(2, 2), r, 0.9);
  const auto sol = solve_mdp_plus(mdp);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(sol.policy.row(c)[1], 1.0);
    EXPECT_NEAR(sol.values[c], r(mdp.state_of(c)) + 0.9 * 10.0, 1e-8);
  }
  const auto optimized = extract_transition(sol.policy, sys);
  for (StateIndex s = 0; s < 2; ++s)
    for (ActionIndex a = 0; a < 2; ++a) EXPECT_EQ(optimized.transition(s, a, 1), 1.0);
}

TEST(MdpPlus, SolutionImprovesOnInitialSystem) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto world = sample_world({.n_states = 8, .n_actions = 3, .connection_factor = 3, .seed = seed});
    const auto pi = optimal_user_policy(world.system, world.reward, 0.9);
    const ReformulatedMdp mdp(world.system, pi, world.reward, 0.9);
    const auto sol = solve_mdp_plus(mdp);
    const auto initial = mdp_plus_policy_value(mdp, as_system_policy(world.system), 1e-12);
    for (std::size_t c = 0; c < mdp.n_composites(); ++c) EXPECT_GE(sol.values[c], initial[c] - 1e-8);
    // Greedy rows are one-hot.
    const auto optimized = extract_transition(sol.policy, world.system);
    for (StateIndex s = 0; s < 8; ++s)
      for (ActionIndex a = 0; a < 3; ++a) {
        const auto row = optimized.transition_row(s, a);
        EXPECT_EQ(std::count(row.begin(), row.end(), 1.0), 1);
      }
  }
}

TEST(MdpPlus, ExtractionRoundTripsAndStaysValid) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto world = sample_world({.n_states = 10, .n_actions = 3, .connection_factor = 1 + seed % 10, .seed = seed});
    const auto back = extract_transition(as_system_policy(world.system), world.system);
    EXPECT_EQ(back.transition_table(), world.system.transition_table());
    const ReformulatedMdp mdp(world.system, random_policy(10, 3, seed), world.reward, 0.9);
    const auto optimized = extract_transition(solve_mdp_plus(mdp).policy, world.system);
    expect_valid(optimized, world.system.connectivity());
    EXPECT_EQ(&optimized.connectivity(), &world.system.connectivity());
    EXPECT_EQ(optimized.initial_distribution(), world.system.initial_distribution());
  }
}

TEST(Iso, QualityIsOptimalUserValue) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto world = sample_world({.n_states = 4, .n_actions = 2, .connection_factor = 2, .reward_fraction = 0.5, .seed = seed});
    EXPECT_NEAR(system_quality(world.system, world.reward, 0.9), brute_force_quality(world.system, world.reward, 0.9),
                1e-8);
  }
}

TEST(Iso, OracleQualityIsMonotoneOnSmallWorlds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto world = sample_world({.n_states = 4, .n_actions = 2, .connection_factor = 2, .reward_fraction = 0.5, .seed = seed});
    TabularSystem current = world.system;
    double previous = brute_force_quality(current, world.reward, 0.9);
    for (int it = 0; it < 10; ++it) {
      auto step = iso_iteration(current, world.reward, world.reward, 0.9);
      const double q = brute_force_quality(step.system, world.reward, 0.9);
      EXPECT_NEAR(step.quality, q, 1e-8);
      EXPECT_GE(q, previous - 1e-6) << "seed " << seed << " iteration " << it;
      previous = q;
      current = std::move(step.system);
    }
  }
}

TEST(Iso, FixedSystemIsAFixedPoint) {
  // cf = 1 leaves nothing to optimize.
  const auto world = sample_world({.n_states = 16, .n_actions = 4, .connection_factor = 1, .seed = 9});
  const auto step = iso_iteration(world.system, world.reward, world.reward, 0.9);
  EXPECT_EQ(step.system.transition_table(), world.system.transition_table());
  EXPECT_NEAR(step.quality, system_quality(world.system, world.reward, 0.9), 1e-6);
}

TEST(Iso, ZeroIterationsGivesInitialRecordOnly) {
  const WorldConfig wc{.n_states = 16, .n_actions = 4, .connection_factor = 4, .seed = 3};
  const auto records = run_iso(wc, BehaviorType{}, IrlMethod::MaxEnt, 0, 3);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_FALSE(records[0].recovered);
  const auto world = sample_world(wc);
  EXPECT_EQ(records[0].quality, system_quality(world.system, world.reward, 0.9));
}

TEST(Iso, DmIrlTraceMatchesOracle) {
  const WorldConfig wc{.n_states = 16, .n_actions = 4, .connection_factor = 4, .seed = 5};
  const auto oracle = run_iso(wc, BehaviorType::parse("IRL-labelled"), IrlMethod::Oracle, 5, 5);
  const auto dm = run_iso(wc, BehaviorType::parse("IRL-labelled"), IrlMethod::DmIrl, 5, 5);
  ASSERT_EQ(oracle.size(), dm.size());
  for (std::size_t k = 0; k < oracle.size(); ++k) EXPECT_NEAR(dm[k].quality, oracle[k].quality, 1e-6);
}

TEST(Iso, OracleImprovesCf2Worlds) {
  double initial = 0.0, final = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto records =
        run_iso(WorldConfig{.connection_factor = 2, .seed = seed}, BehaviorType{}, IrlMethod::Oracle, 30, seed);
    initial += records.front().quality;
    final += records.back().quality;
    for (std::size_t k = 1; k < records.size(); ++k) EXPECT_GE(records[k].quality, records[k - 1].quality - 1e-6);
  }
  EXPECT_GE(final / initial, 1.25);
}

TEST(Iso, RunIsDeterministic) {
  const WorldConfig wc{.n_states = 12, .n_actions = 3, .connection_factor = 3, .seed = 2};
  IsoOptions opts;
  opts.trajectories = 200;
  const auto a = run_iso(wc, BehaviorType::parse("SubOptimal-0.2-MB"), IrlMethod::MaxEnt, 2, 7, opts);
  const auto b = run_iso(wc, BehaviorType::parse("SubOptimal-0.2-MB"), IrlMethod::MaxEnt, 2, 7, opts);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].quality, b[k].quality);
    EXPECT_EQ(a[k].diagnostics.log_hash, b[k].diagnostics.log_hash);
  }
}

TEST(Iso, BehaviorTypeNames) {
  for (const char* name : {"IRL-labelled", "Optimal", "SubOptimal-0.2-MB", "SubOptimal-0.6-NB"})
    EXPECT_EQ(BehaviorType::parse(name).name(), name);
  EXPECT_EQ(BehaviorType::parse("SubOptimal-0.6-NB").noise_factor, 0.6);
  EXPECT_EQ(BehaviorType::parse("SubOptimal-0.2-MB").kind, BehaviorType::Kind::MixOfBehaviors);
  for (const char* bad : {"optimal", "SubOptimal-1.5-MB", "SubOptimal-x-NB", "SubOptimal-0.2-XX", "SubOptimal--MB"})
    EXPECT_THROW(BehaviorType::parse(bad), ConfigError);
  EXPECT_EQ(parse_irl_method("dm_irl"), IrlMethod::DmIrl);
  EXPECT_THROW(parse_irl_method("gail"), ConfigError);
}
