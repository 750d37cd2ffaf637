#include "iso/neural/environment.hpp"

#include <algorithm>

#include "iso/core/errors.hpp"

namespace iso::neural {

RewardKind parse_reward_kind(const std::string& text) {
  if (text == "handcrafted") return RewardKind::Handcrafted;
  if (text == "random") return RewardKind::Random;
  throw ConfigError("unknown reward kind '" + text + "' (expected handcrafted or random)");
}

std::string to_string(RewardKind kind) { return kind == RewardKind::Handcrafted ? "handcrafted" : "random"; }

void NeuralConfig::validate() const {
  if (state_dim == 0) throw ConfigError("state_dim must be positive");
  if (n_actions < 2) throw ConfigError("n_actions must be at least 2");
  if (hidden == 0) throw ConfigError("hidden width must be positive");
}

TrueReward::TrueReward(const NeuralConfig& config) : kind_(config.reward), dim_(config.state_dim) {
  config.validate();
  if (kind_ == RewardKind::Random) {
    net_ = Mlp({dim_, config.hidden, config.hidden, 1});
    auto rng = make_rng(config.seed, stream::kReward);
    net_.init_uniform(rng, 0.5);
  }
}

double TrueReward::operator()(const VectorXd& state) const {
  if (static_cast<std::size_t>(state.size()) != dim_) throw SizeError("state has the wrong dimension for the reward");
  if (kind_ == RewardKind::Handcrafted) return state.squaredNorm() / static_cast<double>(dim_);
  return net_.forward_one(state)[0];
}

RewardFn TrueReward::fn() const {
  return [self = *this](const VectorXd& s) { return self(s); };
}

NeuralSystem NeuralSystem::random(const NeuralConfig& config, Rng& rng) {
  config.validate();
  NeuralSystem system;
  system.state_dim = config.state_dim;
  system.n_actions = config.n_actions;
  system.net = Mlp({config.state_dim + config.n_actions, config.hidden, config.hidden, 2 * config.state_dim});
  system.net.init_glorot(rng);
  return system;
}

VectorXd NeuralSystem::input(const VectorXd& state, std::size_t action) const {
  if (action >= n_actions) throw InvariantViolation("action index out of range");
  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(input_size()));
  x.head(static_cast<Eigen::Index>(state_dim)) = state;
  x[static_cast<Eigen::Index>(state_dim + action)] = 1.0;
  return x;
}

DiagGaussian NeuralSystem::distribution(const VectorXd& state, std::size_t action) const {
  return gaussian_from_head(net.forward_one(input(state, action)), head().bounds());
}

Mlp make_user_net(const NeuralConfig& config, Rng& rng) {
  Mlp net({config.state_dim, config.hidden, config.hidden, config.n_actions});
  net.init_glorot(rng, 0.01);
  return net;
}

VectorXd clip_state(VectorXd state) { return state.cwiseMax(-1.0).cwiseMin(1.0); }

VectorXd sample_initial_state(std::size_t dim, Rng& rng) {
  VectorXd s(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = uniform01(rng) - 0.5;
  return s;
}

UserEnv::UserEnv(const NeuralSystem& system, RewardFn reward) : system_(system), reward_(std::move(reward)) {}

VectorXd UserEnv::reset(Rng& rng) {
  state_ = sample_initial_state(system_.state_dim, rng);
  return state_;
}

StepOutcome UserEnv::step(const VectorXd& action, Rng& rng) {
  const double r = reward_(state_);
  const auto a = static_cast<std::size_t>(action[0]);
  state_ = clip_state(system_.distribution(state_, a).sample(rng));
  return {state_, r};
}

SystemEnv::SystemEnv(std::size_t state_dim, const Mlp& user, RewardFn reward)
    : dim_(state_dim), user_(user), reward_(std::move(reward)) {
  if (user_.input_size() != dim_) throw SizeError("user network input does not match the state dimension");
}

VectorXd SystemEnv::observe(const VectorXd& state, Rng& rng) const {
  const std::size_t a = sample_categorical(user_.forward_one(state), rng);
  VectorXd obs = VectorXd::Zero(static_cast<Eigen::Index>(observation_size()));
  obs.head(static_cast<Eigen::Index>(dim_)) = state;
  obs[static_cast<Eigen::Index>(dim_ + a)] = 1.0;
  return obs;
}

VectorXd SystemEnv::reset(Rng& rng) {
  state_ = sample_initial_state(dim_, rng);
  return observe(state_, rng);
}

StepOutcome SystemEnv::step(const VectorXd& action, Rng& rng) {
  const double r = reward_(state_);
  state_ = clip_state(action);
  return {observe(state_, rng), r};
}

}  // namespace iso::neural
