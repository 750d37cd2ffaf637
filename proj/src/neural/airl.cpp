#include "iso/neural/airl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace iso::neural {
namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

VectorXd log_probs(const Mlp& policy, const PolicyHead& head, const MatrixXd& obs, const MatrixXd& actions) {
  VectorXd logp, entropy;
  head.evaluate(policy.forward(obs), actions, logp, entropy);
  return logp;
}

}  // namespace

RewardFn AirlState::reward_fn() const {
  return [g = reward](const VectorXd& s) { return g.forward_one(s)[0]; };
}

VectorXd AirlState::f(const MatrixXd& states, const MatrixXd& next_states) const {
  const MatrixXd g = reward.forward(states);
  const MatrixXd h = shaping.forward(states);
  const MatrixXd h_next = shaping.forward(next_states);
  return (g + gamma * h_next - h).row(0).transpose();
}

AirlState airl_train(const Rollout& expert, UserEnv& env, const Mlp& init_policy, std::size_t hidden,
                     const AirlOptions& options, std::uint64_t seed) {
  if (expert.size() == 0) throw InvariantViolation("AIRL needs expert transitions");
  const std::size_t dim = env.observation_size();
  if (static_cast<std::size_t>(expert.observations.rows()) != dim) {
    throw SizeError("expert observations do not match the environment");
  }
  auto rng = make_rng(seed, stream::kTrajectory);
  auto init = make_rng(seed, stream::kReward);

  AirlState state;
  state.gamma = options.gamma;
  state.reward = Mlp({dim, hidden, hidden, 1});
  state.shaping = Mlp({dim, hidden, hidden, 1});
  state.reward.init_glorot(init, 0.1);
  state.shaping.init_glorot(init, 0.1);
  Adam g_opt(state.reward.n_params(), {options.disc_learning_rate});
  Adam h_opt(state.shaping.n_params(), {options.disc_learning_rate});

  const PolicyHead head = env.action_head();
  PpoAgent agent(init_policy, head, dim, hidden, options.ppo, derive_seed(seed, 1));

  const auto n_expert = static_cast<std::size_t>(expert.size());
  const auto mb = options.disc_minibatch;
  std::size_t pinned = 0;
  std::size_t done = 0;
  while (done < options.total_steps) {
    Rollout gen = agent.collect(env, std::min(options.ppo.batch_steps, options.total_steps - done), rng);
    done += gen.size();
    const auto raw = gen.episode_returns();

    // Discriminator: expert transitions labelled 1, generator transitions 0.
    AirlRound round;
    round.generator_return = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
    std::vector<Eigen::Index> order(gen.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::size_t correct = 0;
    std::size_t seen = 0;
    double loss_sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t epoch = 0; epoch < options.disc_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < gen.size(); start += mb) {
        const std::size_t m = std::min(mb, gen.size() - start);
        std::vector<Eigen::Index> idx(2 * m);
        for (std::size_t j = 0; j < m; ++j) {
          idx[j] = static_cast<Eigen::Index>(rng() % n_expert);
          idx[m + j] = order[start + j];
        }
        const std::vector<Eigen::Index> e_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
        const std::vector<Eigen::Index> g_idx(idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end());
        MatrixXd s(dim, 2 * m), s_next(dim, 2 * m), a(head.action_size(), 2 * m);
        s << expert.observations(Eigen::all, e_idx), gen.observations(Eigen::all, g_idx);
        s_next << expert.next_observations(Eigen::all, e_idx), gen.next_observations(Eigen::all, g_idx);
        a << expert.actions(Eigen::all, e_idx), gen.actions(Eigen::all, g_idx);
        const VectorXd logp = log_probs(agent.policy(), head, s, a);

        Mlp::Tape g_tape, h_tape, hn_tape;
        const MatrixXd g = state.reward.forward(s, g_tape);
        const MatrixXd h = state.shaping.forward(s, h_tape);
        const MatrixXd hn = state.shaping.forward(s_next, hn_tape);
        MatrixXd d_logit(1, 2 * m);
        const double scale = 1.0 / static_cast<double>(2 * m);
        for (std::size_t j = 0; j < 2 * m; ++j) {
          const auto c = static_cast<Eigen::Index>(j);
          const double logit = g(0, c) + options.gamma * hn(0, c) - h(0, c) - logp[c];
          const double y = j < m ? 1.0 : 0.0;
          loss_sum += y > 0.5 ? softplus(-logit) : softplus(logit);
          d_logit(0, c) = (sigmoid(logit) - y) * scale;
          if ((logit > 0.0) == (y > 0.5)) ++correct;
          lo = std::min(lo, logit);
          hi = std::max(hi, logit);
        }
        seen += 2 * m;
        if (!std::isfinite(loss_sum)) throw LearningError("AIRL discriminator loss became non-finite");
        VectorXd g_grad, h_grad;
        state.reward.backward(g_tape, d_logit, g_grad);
        state.shaping.backward(hn_tape, options.gamma * d_logit, h_grad);
        state.shaping.backward(h_tape, -d_logit, h_grad);
        g_opt.step(state.reward.params(), g_grad);
        h_opt.step(state.shaping.params(), h_grad);
      }
    }
    round.disc_loss = loss_sum / static_cast<double>(seen);
    round.disc_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    round.logit_spread = hi - lo;
    state.diagnostics.push_back(round);

    const bool saturated = round.disc_accuracy >= 0.999;
    const bool flat = round.logit_spread < 1e-9;
    pinned = (saturated || flat) ? pinned + 1 : 0;
    if (options.collapse_window > 0 && pinned >= options.collapse_window) {
      throw AirlCollapse("AIRL mode collapse: discriminator accuracy pinned at " +
                         std::to_string(round.disc_accuracy) + " for " + std::to_string(pinned) + " rounds");
    }

    // Generator reward is the discriminator logit f - log pi.
    const VectorXd f = state.f(gen.observations, gen.next_observations);
    gen.rewards = f - log_probs(agent.policy(), head, gen.observations, gen.actions);
    agent.update(gen, rng);
  }
  state.user_policy = agent.policy();
  return state;
}

}  // namespace iso::neural
