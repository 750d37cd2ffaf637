#pragma once

#include <vector>

#include "iso/neural/ppo.hpp"

namespace iso::neural {

struct AirlOptions {
  std::size_t total_steps = 40960;
  std::size_t disc_minibatch = 256;
  std::size_t disc_epochs = 1;
  double disc_learning_rate = 3e-4;
  double gamma = 0.99;
  /// Rounds of pinned discriminator accuracy before giving up.
  std::size_t collapse_window = 10;
  PpoOptions ppo;
};

struct AirlRound {
  double disc_loss = 0.0;
  double disc_accuracy = 0.0;
  double logit_spread = 0.0;  ///< max - min discriminator logit in the round
  double generator_return = 0.0;
};

// Discriminator logit for a transition (s, a, s'):
//   f(s, s') - log pi(a|s),  f = g(s) + gamma * h(s') - h(s)
// where g is the recovered state-only reward and h a shaping term.
struct AirlState {
  Mlp reward;   ///< g
  Mlp shaping;  ///< h
  Mlp user_policy;
  double gamma = 0.99;
  std::vector<AirlRound> diagnostics;

  double reward_at(const VectorXd& state) const { return reward.forward_one(state)[0]; }
  RewardFn reward_fn() const;
  /// f for a batch of (s, s') columns.
  VectorXd f(const MatrixXd& states, const MatrixXd& next_states) const;
};

/// Mode collapse: discriminator accuracy pinned at 1.0, or pinned at 0.5 by a
/// constant output, for the whole collapse window.
class AirlCollapse : public LearningError {
 public:
  using LearningError::LearningError;
};

/// Adversarial training against expert transitions collected in `env`
/// (observation = state). The generator starts from `init_policy`.
AirlState airl_train(const Rollout& expert, UserEnv& env, const Mlp& init_policy, std::size_t hidden,
                     const AirlOptions& options, std::uint64_t seed);

}  // namespace iso::neural
