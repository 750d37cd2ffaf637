#include "iso/optimizer/iso.hpp"

#include <chrono>
#include <cstdio>
#include "iso/core/errors.hpp"
#include "iso/core/random.hpp"
#include "iso/irl/dm_irl.hpp"
#include "iso/irl/reward_io.hpp"
#include "iso/mdp/solvers.hpp"
#include "iso/optimizer/mdp_plus.hpp"

namespace iso {

BehaviorType BehaviorType::parse(const std::string& name) {
  if (name == "IRL-labelled") return {Kind::IrlLabelled, 0.0};
  if (name == "Optimal") return {Kind::Optimal, 0.0};
  const std::string prefix = "SubOptimal-";
  if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size() + 3) {
    const auto tail = name.substr(name.size() - 3);
    const auto nf_text = name.substr(prefix.size(), name.size() - prefix.size() - 3);
    std::size_t used = 0;
    double nf = 0.0;
    try {
      nf = std::stod(nf_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == nf_text.size() && used > 0 && nf >= 0.0 && nf <= 1.0) {
      if (tail == "-MB") return {Kind::MixOfBehaviors, nf};
      if (tail == "-NB") return {Kind::NoisyBehavior, nf};
    }
  }
  throw ConfigError("unknown behavior type '" + name + "'");
}

std::string BehaviorType::name() const {
  switch (kind) {
    case Kind::IrlLabelled:
      return "IRL-labelled";
    case Kind::Optimal:
      return "Optimal";
    case Kind::MixOfBehaviors:
    case Kind::NoisyBehavior: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", noise_factor);
      return std::string("SubOptimal-") + buf + (kind == Kind::MixOfBehaviors ? "-MB" : "-NB");
    }
  }
  return "?";
}

IrlMethod parse_irl_method(const std::string& name) {
  if (name == "oracle") return IrlMethod::Oracle;
  if (name == "dm_irl" || name == "dm-irl") return IrlMethod::DmIrl;
  if (name == "maxent" || name == "maxent_irl") return IrlMethod::MaxEnt;
  throw ConfigError("unknown IRL method '" + name + "'");
}

std::string to_string(IrlMethod method) {
  switch (method) {
    case IrlMethod::Oracle:
      return "oracle";
    case IrlMethod::DmIrl:
      return "dm_irl";
    case IrlMethod::MaxEnt:
      return "maxent";
  }
  return "?";
}

Policy optimal_user_policy(const TabularSystem& system, const RewardModel& reward, double gamma) {
  return soft_value_iteration(system, reward, gamma).policy;
}

double system_quality(const TabularSystem& system, const RewardModel& truth, double gamma) {
  // Value of a user who acts optimally under the true reward.
  const auto best = value_iteration(system, truth, gamma);
  return expected_state_value(system, best.policy, truth, gamma);
}

IsoStep iso_iteration(const TabularSystem& system, const RewardModel& reward, const RewardModel& truth,
                      double gamma, double mdp_plus_tolerance) {
  const Policy user = optimal_user_policy(system, reward, gamma);
  const ReformulatedMdp mdp(system, user, reward, gamma);
  const auto solution = solve_mdp_plus(mdp, mdp_plus_tolerance);
  TabularSystem optimized = extract_transition(solution.policy, system);
  Policy adapted = optimal_user_policy(optimized, truth, gamma);
  const double quality = system_quality(optimized, truth, gamma);
  return IsoStep{std::move(optimized), std::move(adapted), quality, solution.residual};
}

Recovery recover_reward(const TabularSystem& system, const RewardModel& truth, const BehaviorType& behavior,
                        IrlMethod method, std::uint64_t log_seed, const IsoOptions& options) {
  Recovery out{truth, {}};
  if (method == IrlMethod::Oracle) return out;

  const Policy user = optimal_user_policy(system, truth, options.gamma);
  std::vector<Trajectory> log;
  switch (behavior.kind) {
    case BehaviorType::Kind::IrlLabelled:
    case BehaviorType::Kind::Optimal:
      log = sample_trajectories(system, user, options.trajectories, options.lengths, log_seed);
      break;
    case BehaviorType::Kind::MixOfBehaviors:
      log = mix_behaviors(system, user, behavior.noise_factor, options.trajectories, options.lengths, log_seed);
      break;
    case BehaviorType::Kind::NoisyBehavior:
      log = sample_trajectories(system, noisy_policy(user, behavior.noise_factor).policy, options.trajectories,
                                options.lengths, log_seed);
      break;
  }

  if (method == IrlMethod::DmIrl) {
    log = score_trajectories(log, truth, options.gamma);
    auto fit = dm_irl(log, system.n_states(), options.gamma);
    out.reward = std::move(fit.reward);
    out.diagnostics.rank_deficient = fit.rank_deficient;
  } else {
    auto fit = maxent_irl(log, system, options.maxent);
    out.reward = std::move(fit.reward);
    if (!fit.gradient_norms.empty()) out.diagnostics.final_gradient_norm = fit.gradient_norms.back();
  }
  out.diagnostics.log_hash = log_identity_hash(log);
  return out;
}

std::vector<IterationRecord> run_iso(const TabularSystem& system, const RewardModel& truth,
                                     const BehaviorType& behavior, IrlMethod method, std::size_t n_iterations,
                                     std::uint64_t seed, const IsoOptions& options) {
  using Clock = std::chrono::steady_clock;
  std::vector<IterationRecord> records;
  records.reserve(n_iterations + 1);

  auto start = Clock::now();
  TabularSystem current = system;
  IterationRecord initial;
  initial.quality = system_quality(current, truth, options.gamma);
  initial.diagnostics.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  records.push_back(std::move(initial));

  for (std::size_t it = 1; it <= n_iterations; ++it) {
    start = Clock::now();
    IterationRecord record;
    record.iteration = it;
    try {
      auto recovery = recover_reward(current, truth, behavior, method, derive_seed(seed, it), options);
      const RewardModel used = options.normalize_reward ? recovery.reward.normalized() : recovery.reward;
      auto step = iso_iteration(current, used, truth, options.gamma, options.mdp_plus_tolerance);
      record.recovered = std::move(recovery.reward);
      record.quality = step.quality;
      record.diagnostics = std::move(recovery.diagnostics);
      record.diagnostics.mdp_plus_residual = step.mdp_plus_residual;
      current = std::move(step.system);
    } catch (const LearningError& e) {
      throw LearningError("ISO iteration " + std::to_string(it) + ": " + e.what());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("ISO iteration " + std::to_string(it) + ": " + e.what(), e.residual(), e.iterations());
    }
    record.diagnostics.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<IterationRecord> run_iso(const WorldConfig& world, const BehaviorType& behavior, IrlMethod method,
                                     std::size_t n_iterations, std::uint64_t seed, const IsoOptions& options) {
  const World sampled = sample_world(world);
  return run_iso(sampled.system, sampled.reward, behavior, method, n_iterations, seed, options);
}

}  // namespace iso
