#include "iso/neural/neural_iso.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

namespace iso::neural {
namespace {

// Per-iteration sub-streams.
enum Role : std::uint64_t { kUserTrain = 1, kExpert = 2, kAirl = 3, kSystemOpt = 4, kEval = 5 };

std::uint64_t role_seed(std::uint64_t seed, std::size_t iteration, Role role) {
  return derive_seed(derive_seed(seed, iteration), role);
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

nlohmann::json ppo_json(const PpoOptions& p) {
  return {{"clip", p.clip},
          {"gamma", p.gamma},
          {"gae_lambda", p.gae_lambda},
          {"epochs", p.epochs},
          {"batch_steps", p.batch_steps},
          {"minibatch", p.minibatch},
          {"learning_rate", p.learning_rate},
          {"entropy_coef", p.entropy_coef},
          {"max_grad_norm", p.max_grad_norm},
          {"target_kl", p.target_kl}};
}

PpoOptions ppo_from(const nlohmann::json& j) {
  reject_unknown(j,
                 {"clip", "gamma", "gae_lambda", "epochs", "batch_steps", "minibatch", "learning_rate", "entropy_coef",
                  "max_grad_norm", "target_kl"},
                 "ppo");
  PpoOptions p;
  p.clip = j.value("clip", p.clip);
  p.gamma = j.value("gamma", p.gamma);
  p.gae_lambda = j.value("gae_lambda", p.gae_lambda);
  p.epochs = j.value("epochs", p.epochs);
  p.batch_steps = j.value("batch_steps", p.batch_steps);
  p.minibatch = j.value("minibatch", p.minibatch);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.entropy_coef = j.value("entropy_coef", p.entropy_coef);
  p.max_grad_norm = j.value("max_grad_norm", p.max_grad_norm);
  p.target_kl = j.value("target_kl", p.target_kl);
  return p;
}

}  // namespace

Setup Setup::parse(const std::string& text) {
  if (text == "oracle-oracle") return {Source::Oracle, Source::Oracle};
  if (text == "airl-oracle") return {Source::Airl, Source::Oracle};
  if (text == "airl-airl") return {Source::Airl, Source::Airl};
  throw ConfigError("unknown setup '" + text + "' (expected oracle-oracle, airl-oracle or airl-airl)");
}

std::string Setup::name() const {
  auto part = [](Source s) { return s == Source::Oracle ? std::string("oracle") : std::string("airl"); };
  return part(reward) + "-" + part(user);
}

void NeuralIsoConfig::validate() const {
  world.validate();
  if (!(lambda_kl >= 0.0) || !std::isfinite(lambda_kl)) throw ConfigError("lambda must be finite and non-negative");
  if (expert_trajectories == 0) throw ConfigError("expert_trajectories must be positive");
  if (eval_trajectories < 2) throw ConfigError("eval_trajectories must be at least 2");
  if (ppo.clip <= 0.0 || ppo.clip >= 1.0) throw ConfigError("PPO clip must lie in (0, 1)");
  if (ppo.gamma <= 0.0 || ppo.gamma > 1.0) throw ConfigError("PPO gamma must lie in (0, 1]");
  if (ppo.learning_rate <= 0.0) throw ConfigError("PPO learning rate must be positive");
  if (ppo.batch_steps == 0 || ppo.minibatch == 0 || ppo.epochs == 0) {
    throw ConfigError("PPO batch, minibatch and epochs must be positive");
  }
  if (airl.disc_minibatch == 0 || airl.disc_epochs == 0) throw ConfigError("AIRL batch sizes must be positive");
}

nlohmann::json to_json(const NeuralIsoConfig& c) {
  return {{"world",
           {{"state_dim", c.world.state_dim},
            {"n_actions", c.world.n_actions},
            {"hidden", c.world.hidden},
            {"reward", to_string(c.world.reward)},
            {"seed", c.world.seed}}},
          {"setup", c.setup.name()},
          {"lambda", c.lambda_kl},
          {"iterations", c.iterations},
          {"expert_trajectories", c.expert_trajectories},
          {"eval_trajectories", c.eval_trajectories},
          {"user_steps", c.user_steps},
          {"system_steps", c.system_steps},
          {"airl",
           {{"total_steps", c.airl.total_steps},
            {"disc_minibatch", c.airl.disc_minibatch},
            {"disc_epochs", c.airl.disc_epochs},
            {"disc_learning_rate", c.airl.disc_learning_rate},
            {"gamma", c.airl.gamma},
            {"collapse_window", c.airl.collapse_window},
            {"ppo", ppo_json(c.airl.ppo)}}},
          {"ppo", ppo_json(c.ppo)}};
}

NeuralIsoConfig neural_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"world", "setup", "lambda", "iterations", "expert_trajectories", "eval_trajectories", "user_steps",
                  "system_steps", "airl", "ppo"},
                 "neural config");
  NeuralIsoConfig c;
  try {
    if (j.contains("world")) {
      const auto& w = j.at("world");
      reject_unknown(w, {"state_dim", "n_actions", "hidden", "reward", "seed"}, "world");
      c.world.state_dim = w.value("state_dim", c.world.state_dim);
      c.world.n_actions = w.value("n_actions", c.world.n_actions);
      c.world.hidden = w.value("hidden", c.world.hidden);
      if (w.contains("reward")) c.world.reward = parse_reward_kind(w.at("reward").get<std::string>());
      c.world.seed = w.value("seed", c.world.seed);
    }
    if (j.contains("setup")) c.setup = Setup::parse(j.at("setup").get<std::string>());
    c.lambda_kl = j.value("lambda", c.lambda_kl);
    c.iterations = j.value("iterations", c.iterations);
    c.expert_trajectories = j.value("expert_trajectories", c.expert_trajectories);
    c.eval_trajectories = j.value("eval_trajectories", c.eval_trajectories);
    c.user_steps = j.value("user_steps", c.user_steps);
    c.system_steps = j.value("system_steps", c.system_steps);
    if (j.contains("airl")) {
      const auto& a = j.at("airl");
      reject_unknown(a, {"total_steps", "disc_minibatch", "disc_epochs", "disc_learning_rate", "gamma",
                         "collapse_window", "ppo"},
                     "airl");
      c.airl.total_steps = a.value("total_steps", c.airl.total_steps);
      c.airl.disc_minibatch = a.value("disc_minibatch", c.airl.disc_minibatch);
      c.airl.disc_epochs = a.value("disc_epochs", c.airl.disc_epochs);
      c.airl.disc_learning_rate = a.value("disc_learning_rate", c.airl.disc_learning_rate);
      c.airl.gamma = a.value("gamma", c.airl.gamma);
      c.airl.collapse_window = a.value("collapse_window", c.airl.collapse_window);
      if (a.contains("ppo")) c.airl.ppo = ppo_from(a.at("ppo"));
    }
    if (j.contains("ppo")) c.ppo = ppo_from(j.at("ppo"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed neural config: ") + e.what());
  }
  c.validate();
  return c;
}

Mlp train_user(const NeuralSystem& system, const RewardFn& reward, Mlp user, std::size_t steps,
               const PpoOptions& options, std::uint64_t seed) {
  UserEnv env(system, reward);
  PpoAgent agent(std::move(user), env.action_head(), system.state_dim, system.net.sizes()[1], options, seed);
  auto rng = make_rng(seed, stream::kTrajectory);
  agent.train(env, steps, rng);
  return agent.policy();
}

ReturnEstimate average_return(const NeuralSystem& system, const RewardFn& reward, const Mlp& user,
                              std::size_t n_trajectories, std::uint64_t seed) {
  if (n_trajectories == 0) return {};
  UserEnv env(system, reward);
  auto rng = make_rng(seed, stream::kTrajectory);
  const Rollout r = sample_episodes(user, env.action_head(), env, n_trajectories, rng);
  const auto returns = r.episode_returns();
  const double n = static_cast<double>(returns.size());
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  if (returns.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : returns) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

ReturnEstimate evaluate_average_return(const NeuralSystem& system, const RewardFn& reward,
                                       std::size_t n_trajectories, const NeuralConfig& config, std::size_t user_steps,
                                       const PpoOptions& options, std::uint64_t seed) {
  auto init = make_rng(seed, stream::kInitial);
  const Mlp user = train_user(system, reward, make_user_net(config, init), user_steps, options, seed);
  return average_return(system, reward, user, n_trajectories, derive_seed(seed, kEval));
}

double mean_system_kl(const NeuralSystem& current, const NeuralSystem& reference, const Mlp& user,
                      const RewardFn& reward, std::size_t episodes, std::uint64_t seed) {
  SystemEnv env(current.state_dim, user, reward);
  auto rng = make_rng(seed, stream::kTrajectory);
  const Rollout r = sample_episodes(current.net, current.head(), env, episodes, rng);
  const MatrixXd ref = reference.net.forward(r.observations);
  double total = 0.0;
  for (Eigen::Index i = 0; i < ref.cols(); ++i) {
    total += kl_divergence(gaussian_from_head(r.heads.col(i)), gaussian_from_head(ref.col(i)));
  }
  return total / static_cast<double>(ref.cols());
}

SystemOptimization optimize_system_neural(const NeuralSystem& system, const RewardFn& reward, const Mlp& user,
                                          double lambda_kl, std::size_t steps, const PpoOptions& options,
                                          std::uint64_t seed) {
  if (!(lambda_kl >= 0.0)) throw ConfigError("lambda must be non-negative");
  const NeuralSystem start = system;
  SystemEnv env(system.state_dim, user, reward);
  PpoAgent agent(system.net, system.head(), system.input_size(), system.net.sizes()[1], options, seed);
  auto rng = make_rng(seed, stream::kTrajectory);

  Relabel relabel;
  if (lambda_kl > 0.0) {
    // Reward term: effect on visited states. Loss term: direct gradient.
    agent.set_kl_anchor(&start.net, lambda_kl);
    relabel = [&start, lambda_kl](Rollout& r) {
      const MatrixXd ref = start.net.forward(r.observations);
      for (Eigen::Index i = 0; i < ref.cols(); ++i) {
        r.rewards[i] -= lambda_kl * kl_divergence(gaussian_from_head(r.heads.col(i)), gaussian_from_head(ref.col(i)));
      }
    };
  }
  SystemOptimization out;
  out.curve = agent.train(env, steps, rng, relabel);
  out.system = start;
  out.system.net = agent.policy();
  out.mean_kl = mean_system_kl(out.system, start, user, reward, 50, derive_seed(seed, 7));
  return out;
}

NeuralRun run_iso_neural(const NeuralIsoConfig& config) {
  config.validate();
  const std::uint64_t seed = config.world.seed;
  const TrueReward truth(config.world);
  const RewardFn true_fn = truth.fn();
  auto system_rng = make_rng(seed, stream::kTransition);
  auto user_rng = make_rng(seed, stream::kInitial);

  NeuralRun run;
  run.system = NeuralSystem::random(config.world, system_rng);
  const Mlp fresh_user = make_user_net(config.world, user_rng);

  auto clock = std::chrono::steady_clock::now();
  auto elapsed = [&clock] {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - clock).count();
    clock = now;
    return ms;
  };

  // The oracle user trained for evaluation also generates the next expert log.
  run.user = train_user(run.system, true_fn, fresh_user, config.user_steps, config.ppo, role_seed(seed, 0, kUserTrain));
  auto est = average_return(run.system, true_fn, run.user, config.eval_trajectories, role_seed(seed, 0, kEval));
  run.records.push_back({0, est.mean, est.sem, 0.0, std::nullopt, elapsed()});

  for (std::size_t k = 1; k <= config.iterations; ++k) {
    NeuralIterationRecord record;
    record.iteration = k;
    UserEnv expert_env(run.system, true_fn);
    auto expert_rng = make_rng(role_seed(seed, k, kExpert), stream::kTrajectory);
    const Rollout expert =
        sample_episodes(run.user, expert_env.action_head(), expert_env, config.expert_trajectories, expert_rng);

    RewardFn plus_reward = true_fn;
    Mlp plus_user = run.user;
    if (config.setup.uses_airl()) {
      const AirlState airl =
          airl_train(expert, expert_env, fresh_user, config.world.hidden, config.airl, role_seed(seed, k, kAirl));
      record.discriminator_accuracy = airl.diagnostics.back().disc_accuracy;
      if (config.setup.reward == Source::Airl) plus_reward = airl.reward_fn();
      if (config.setup.user == Source::Airl) plus_user = airl.user_policy;
    }

    auto opt = optimize_system_neural(run.system, plus_reward, plus_user, config.lambda_kl, config.system_steps,
                                      config.ppo, role_seed(seed, k, kSystemOpt));
    run.system = std::move(opt.system);
    record.system_kl = opt.mean_kl;

    run.user = train_user(run.system, true_fn, run.user, config.user_steps, config.ppo, role_seed(seed, k, kUserTrain));
    est = average_return(run.system, true_fn, run.user, config.eval_trajectories, role_seed(seed, k, kEval));
    record.mean_return = est.mean;
    record.sem = est.sem;
    record.wall_ms = elapsed();
    run.records.push_back(record);
  }
  return run;
}

}  // namespace iso::neural
