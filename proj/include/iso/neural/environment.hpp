#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "iso/neural/distributions.hpp"
#include "iso/neural/mlp.hpp"

namespace iso::neural {

/// Every episode has exactly this many steps.
inline constexpr std::size_t kEpisodeLength = 40;

using RewardFn = std::function<double(const VectorXd& state)>;

enum class RewardKind { Handcrafted, Random };

RewardKind parse_reward_kind(const std::string& text);
std::string to_string(RewardKind kind);

struct NeuralConfig {
  std::size_t state_dim = 50;
  std::size_t n_actions = 10;
  std::size_t hidden = 64;
  RewardKind reward = RewardKind::Handcrafted;
  std::uint64_t seed = 0;

  void validate() const;
};

// User-side ground truth: handcrafted |s|^2 / d, or a fixed random network.
class TrueReward {
 public:
  TrueReward() = default;
  TrueReward(const NeuralConfig& config);

  RewardKind kind() const { return kind_; }
  double operator()(const VectorXd& state) const;
  RewardFn fn() const;

 private:
  RewardKind kind_ = RewardKind::Handcrafted;
  std::size_t dim_ = 0;
  Mlp net_;
};

/// System policy: (s, one-hot a) -> diagonal Gaussian over the next state.
struct NeuralSystem {
  std::size_t state_dim = 0;
  std::size_t n_actions = 0;
  Mlp net;

  static NeuralSystem random(const NeuralConfig& config, Rng& rng);

  PolicyHead head() const { return PolicyHead::gaussian(state_dim); }
  std::size_t input_size() const { return state_dim + n_actions; }
  VectorXd input(const VectorXd& state, std::size_t action) const;
  DiagGaussian distribution(const VectorXd& state, std::size_t action) const;
};

/// User policy network: state -> action logits.
Mlp make_user_net(const NeuralConfig& config, Rng& rng);

VectorXd clip_state(VectorXd state);
VectorXd sample_initial_state(std::size_t dim, Rng& rng);

struct StepOutcome {
  VectorXd observation;
  double reward = 0.0;
};

// Fixed-length episodic environment. The reward of a step is the reward of
// the state the step starts from, so an episode scores r(S_0) ... r(S_39).
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t observation_size() const = 0;
  virtual PolicyHead action_head() const = 0;
  virtual VectorXd reset(Rng& rng) = 0;
  virtual StepOutcome step(const VectorXd& action, Rng& rng) = 0;
  std::size_t horizon() const { return kEpisodeLength; }
};

// Original MDP: the user acts, the frozen system samples the next state.
class UserEnv final : public Environment {
 public:
  UserEnv(const NeuralSystem& system, RewardFn reward);

  std::size_t observation_size() const override { return system_.state_dim; }
  PolicyHead action_head() const override { return PolicyHead::categorical(system_.n_actions); }
  VectorXd reset(Rng& rng) override;
  StepOutcome step(const VectorXd& action, Rng& rng) override;

 private:
  const NeuralSystem& system_;
  RewardFn reward_;
  VectorXd state_;
};

// Role-swapped MDP: the system acts by proposing the next state; the frozen
// user policy then picks an action there. Observation is s (+) one-hot(a).
class SystemEnv final : public Environment {
 public:
  SystemEnv(std::size_t state_dim, const Mlp& user, RewardFn reward);

  std::size_t observation_size() const override { return dim_ + user_.output_size(); }
  PolicyHead action_head() const override { return PolicyHead::gaussian(dim_); }
  VectorXd reset(Rng& rng) override;
  StepOutcome step(const VectorXd& action, Rng& rng) override;

 private:
  VectorXd observe(const VectorXd& state, Rng& rng) const;

  std::size_t dim_;
  const Mlp& user_;
  RewardFn reward_;
  VectorXd state_;
};

}  // namespace iso::neural
