#include "iso/behavior/behavior.hpp"

#include <algorithm>
#include <cmath>

#include "iso/core/errors.hpp"
#include "iso/core/random.hpp"
#include "iso/mdp/solvers.hpp"

namespace iso {
namespace {

void check_noise(double nf) {
  if (!(nf >= 0.0 && nf <= 1.0)) throw ConfigError("noise factor must lie in [0, 1]");
}

Trajectory sample_one(const TabularSystem& system, const Policy& policy, LengthRange lengths, Rng& rng) {
  const std::size_t span = lengths.max - lengths.min + 1;
  const std::size_t length =
      lengths.min + std::min(span - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span)));
  Trajectory trajectory;
  trajectory.steps.reserve(length);
  StateIndex s = sample_index(system.initial_distribution(), rng);
  for (std::size_t t = 0; t < length; ++t) {
    const ActionIndex a = sample_index(policy.row(s), rng);
    trajectory.steps.push_back(Step{s, a});
    if (t + 1 < length) s = sample_index(system.transition_row(s, a), rng);
  }
  return trajectory;
}

Rng trajectory_rng(std::uint64_t seed, std::size_t index) {
  return Rng(derive_seed(derive_seed(seed, stream::kTrajectory), index));
}

}  // namespace

std::vector<Trajectory> sample_trajectories(const TabularSystem& system, const Policy& policy, std::size_t count,
                                            LengthRange lengths, std::uint64_t seed) {
  check_compatible(system, policy);
  if (lengths.min == 0 || lengths.min > lengths.max) throw ConfigError("invalid trajectory length range");
  std::vector<Trajectory> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = trajectory_rng(seed, i);
    out.push_back(sample_one(system, policy, lengths, rng));
  }
  return out;
}

Policy adversarial_policy(const Policy& policy) {
  std::vector<ActionIndex> choice(policy.n_states());
  for (StateIndex s = 0; s < policy.n_states(); ++s) choice[s] = policy.argmin(s);
  return Policy::deterministic(policy.n_actions(), choice);
}

std::size_t adversarial_count(double noise_factor, std::size_t count) {
  check_noise(noise_factor);
  // The small offset keeps products like 0.2 * 15000 from rounding up.
  const double exact = noise_factor * static_cast<double>(count);
  return std::min(count, static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact))));
}

std::vector<Trajectory> mix_behaviors(const TabularSystem& system, const Policy& optimal, double noise_factor,
                                      std::size_t count, LengthRange lengths, std::uint64_t seed) {
  check_compatible(system, optimal);
  if (lengths.min == 0 || lengths.min > lengths.max) throw ConfigError("invalid trajectory length range");
  const std::size_t n_adversarial = adversarial_count(noise_factor, count);
  const Policy adversary = adversarial_policy(optimal);
  std::vector<Trajectory> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = trajectory_rng(seed, i);
    out.push_back(sample_one(system, i < n_adversarial ? adversary : optimal, lengths, rng));
  }
  if (n_adversarial > 0 && n_adversarial < count) {
    Rng rng = make_rng(seed, stream::kShuffle);
    for (std::size_t i = count - 1; i > 0; --i) {
      const auto j = std::min(i, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1)));
      std::swap(out[i], out[j]);
    }
  }
  return out;
}

NoisyPolicy noisy_policy(const Policy& policy, double noise_factor) {
  check_noise(noise_factor);
  const std::size_t na = policy.n_actions();
  if (na == 1) return NoisyPolicy{policy, noise_factor > 0.0};
  std::vector<double> probs(policy.n_states() * na, 0.0);
  const double spread = noise_factor / static_cast<double>(na - 1);
  for (StateIndex s = 0; s < policy.n_states(); ++s) {
    const ActionIndex best = policy.argmax(s);
    for (ActionIndex a = 0; a < na; ++a) probs[s * na + a] = (a == best) ? 1.0 - noise_factor : spread;
  }
  return NoisyPolicy{Policy(policy.n_states(), na, std::move(probs)), false};
}

std::vector<double> accrued_features(const Trajectory& trajectory, std::size_t n_states, double gamma) {
  std::vector<double> psi(n_states, 0.0);
  double weight = 1.0;
  for (const auto& step : trajectory.steps) {
    psi.at(step.state) += weight;
    weight *= gamma;
  }
  return psi;
}

std::vector<Trajectory> score_trajectories(const std::vector<Trajectory>& trajectories, const RewardModel& reward,
                                           double gamma) {
  std::vector<Trajectory> out = trajectories;
  for (auto& trajectory : out) trajectory.score = discounted_return(trajectory, reward, gamma);
  return out;
}

}  // namespace iso
