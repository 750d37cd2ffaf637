#pragma once

#include <functional>
#include <vector>

#include "iso/core/errors.hpp"
#include "iso/neural/environment.hpp"

namespace iso::neural {

struct PpoOptions {
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  std::size_t epochs = 4;
  std::size_t batch_steps = 2048;
  std::size_t minibatch = 256;
  double learning_rate = 3e-4;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  /// Stop the epoch loop once the approximate KL exceeds 1.5x this; 0 = off.
  double target_kl = 0.0;
};

/// Thrown on a non-finite loss; carries the parameters from before the
/// failing update.
class TrainingFailure : public LearningError {
 public:
  TrainingFailure(const std::string& what, VectorXd last_good)
      : LearningError(what), last_good_(std::move(last_good)) {}
  const VectorXd& last_good() const { return last_good_; }

 private:
  VectorXd last_good_;
};

// Whole episodes stored back to back, one column per step.
struct Rollout {
  std::size_t horizon = kEpisodeLength;
  MatrixXd observations;
  MatrixXd next_observations;
  MatrixXd actions;
  VectorXd rewards;
  VectorXd log_probs;  ///< behavior policy log pi(a|s) at collection time
  MatrixXd heads;      ///< behavior policy head outputs

  std::size_t size() const { return static_cast<std::size_t>(rewards.size()); }
  std::size_t episodes() const { return size() / horizon; }
  /// Undiscounted return per episode.
  std::vector<double> episode_returns() const;
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  /// Fraction of samples whose final ratio lies within [1 - clip, 1 + clip].
  double ratio_in_range = 0.0;
  double mean_return = 0.0;
  std::size_t epochs_run = 0;
};

/// Rewrites rewards between collection and update.
using Relabel = std::function<void(Rollout&)>;

// Clipped-surrogate PPO with GAE. The value network sees the observation and
// the elapsed fraction of the episode.
class PpoAgent {
 public:
  PpoAgent(Mlp policy, PolicyHead head, std::size_t observation_size, std::size_t hidden, PpoOptions options,
           std::uint64_t seed);

  const Mlp& policy() const { return policy_; }
  Mlp& policy() { return policy_; }
  const Mlp& value() const { return value_; }
  const PolicyHead& head() const { return head_; }
  const PpoOptions& options() const { return options_; }

  Rollout collect(Environment& env, std::size_t steps, Rng& rng) const;
  UpdateStats update(const Rollout& rollout, Rng& rng);

  /// Adds coef * KL(current || reference) at the sampled observations to the
  /// policy loss, so the penalty also acts through its direct dependence on
  /// the parameters. `reference` is not owned; coef = 0 disables the term.
  void set_kl_anchor(const Mlp* reference, double coef);
  /// collect -> relabel -> update until `total_steps` environment steps.
  std::vector<UpdateStats> train(Environment& env, std::size_t total_steps, Rng& rng, const Relabel& relabel = {});

 private:
  MatrixXd value_inputs(const Rollout& rollout) const;

  Mlp policy_;
  PolicyHead head_;
  Mlp value_;
  PpoOptions options_;
  Adam policy_opt_;
  Adam value_opt_;
  const Mlp* anchor_ = nullptr;
  double anchor_coef_ = 0.0;
};

/// Samples whole episodes with a frozen policy network.
Rollout sample_episodes(const Mlp& policy, const PolicyHead& head, Environment& env, std::size_t episodes, Rng& rng,
                        bool greedy = false);

}  // namespace iso::neural
