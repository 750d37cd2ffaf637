#include "iso/neural/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace iso::neural {

std::vector<double> Rollout::episode_returns() const {
  std::vector<double> out(episodes(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) out[i / horizon] += rewards[static_cast<Eigen::Index>(i)];
  return out;
}

Rollout sample_episodes(const Mlp& policy, const PolicyHead& head, Environment& env, std::size_t episodes, Rng& rng,
                        bool greedy) {
  const std::size_t h = env.horizon();
  const auto n = static_cast<Eigen::Index>(episodes * h);
  const auto obs_size = static_cast<Eigen::Index>(env.observation_size());
  Rollout r;
  r.horizon = h;
  r.observations.resize(obs_size, n);
  r.next_observations.resize(obs_size, n);
  r.actions.resize(static_cast<Eigen::Index>(head.action_size()), n);
  r.heads.resize(static_cast<Eigen::Index>(head.output_size()), n);
  r.rewards.resize(n);
  r.log_probs.resize(n);
  Eigen::Index col = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    VectorXd obs = env.reset(rng);
    for (std::size_t t = 0; t < h; ++t, ++col) {
      const VectorXd out = policy.forward_one(obs);
      const VectorXd action = greedy ? head.mode(out) : head.sample(out, rng);
      r.observations.col(col) = obs;
      r.actions.col(col) = action;
      r.heads.col(col) = out;
      r.log_probs[col] = head.log_prob(out, action);
      auto outcome = env.step(action, rng);
      r.rewards[col] = outcome.reward;
      r.next_observations.col(col) = outcome.observation;
      obs = std::move(outcome.observation);
    }
  }
  return r;
}

PpoAgent::PpoAgent(Mlp policy, PolicyHead head, std::size_t observation_size, std::size_t hidden, PpoOptions options,
                   std::uint64_t seed)
    : policy_(std::move(policy)), head_(head), value_({observation_size + 1, hidden, hidden, 1}), options_(options) {
  if (policy_.output_size() != head_.output_size()) throw SizeError("policy output does not match its head");
  if (policy_.input_size() != observation_size) throw SizeError("policy input does not match the observation");
  if (options_.minibatch == 0 || options_.epochs == 0 || options_.batch_steps == 0) {
    throw ConfigError("PPO batch, minibatch and epochs must be positive");
  }
  auto rng = make_rng(seed, 0x76616c75ULL);
  value_.init_glorot(rng);
  policy_opt_ = Adam(policy_.n_params(), {options_.learning_rate});
  value_opt_ = Adam(value_.n_params(), {options_.learning_rate});
}

void PpoAgent::set_kl_anchor(const Mlp* reference, double coef) {
  if (!(coef >= 0.0)) throw ConfigError("KL anchor coefficient must be non-negative");
  if (reference && (reference->input_size() != policy_.input_size() || reference->output_size() != policy_.output_size())) {
    throw SizeError("KL anchor network does not match the policy");
  }
  anchor_ = reference;
  anchor_coef_ = coef;
}

Rollout PpoAgent::collect(Environment& env, std::size_t steps, Rng& rng) const {
  const std::size_t episodes = std::max<std::size_t>(1, (steps + env.horizon() - 1) / env.horizon());
  return sample_episodes(policy_, head_, env, episodes, rng);
}

MatrixXd PpoAgent::value_inputs(const Rollout& rollout) const {
  MatrixXd x(rollout.observations.rows() + 1, rollout.observations.cols());
  x.topRows(rollout.observations.rows()) = rollout.observations;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    x(x.rows() - 1, i) = static_cast<double>(static_cast<std::size_t>(i) % rollout.horizon) /
                         static_cast<double>(rollout.horizon);
  }
  return x;
}

UpdateStats PpoAgent::update(const Rollout& rollout, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(rollout.size());
  const std::size_t h = rollout.horizon;
  const MatrixXd vin = value_inputs(rollout);
  const VectorXd values = value_.forward(vin).row(0).transpose();

  // GAE over fixed-length episodes; the step after the last one is terminal.
  VectorXd adv(n), returns(n);
  for (std::size_t e = 0; e < rollout.episodes(); ++e) {
    double running = 0.0;
    for (std::size_t t = h; t-- > 0;) {
      const auto i = static_cast<Eigen::Index>(e * h + t);
      const double next = t + 1 < h ? values[i + 1] : 0.0;
      const double delta = rollout.rewards[i] + options_.gamma * next - values[i];
      running = delta + options_.gamma * options_.gae_lambda * running;
      adv[i] = running;
    }
  }
  returns = adv + values;
  const double mean = adv.mean();
  const double sd = std::sqrt((adv.array() - mean).square().mean());
  const VectorXd norm_adv = ((adv.array() - mean) / (sd + 1e-8)).matrix();

  UpdateStats stats;
  const auto ep = rollout.episode_returns();
  stats.mean_return = ep.empty() ? 0.0 : std::accumulate(ep.begin(), ep.end(), 0.0) / static_cast<double>(ep.size());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto mb = static_cast<Eigen::Index>(options_.minibatch);
  VectorXd logp, entropy;
  const VectorXd good = policy_.params();

  for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double kl_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += mb) {
      const Eigen::Index m = std::min(mb, n - start);
      const std::vector<Eigen::Index> idx(order.begin() + start, order.begin() + start + m);
      const MatrixXd obs = rollout.observations(Eigen::all, idx);
      const MatrixXd act = rollout.actions(Eigen::all, idx);

      Mlp::Tape tape;
      const MatrixXd heads = policy_.forward(obs, tape);
      head_.evaluate(heads, act, logp, entropy);
      VectorXd weight(m);
      double surrogate = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index i = idx[static_cast<std::size_t>(j)];
        const double ratio = std::exp(logp[j] - rollout.log_probs[i]);
        const double a = norm_adv[i];
        const double clipped = std::clamp(ratio, 1.0 - options_.clip, 1.0 + options_.clip);
        const bool use_clip = clipped * a < ratio * a;
        surrogate += use_clip ? clipped * a : ratio * a;
        weight[j] = use_clip ? 0.0 : -ratio * a / static_cast<double>(m);
        kl_sum += rollout.log_probs[i] - logp[j];
      }
      double loss = -surrogate / static_cast<double>(m) - options_.entropy_coef * entropy.mean();
      MatrixXd grad_head;
      head_.evaluate(heads, act, logp, entropy, &weight, -options_.entropy_coef / static_cast<double>(m), &grad_head);
      if (anchor_ && anchor_coef_ > 0.0) {
        const MatrixXd ref = anchor_->forward(obs);
        VectorXd g;
        for (Eigen::Index j = 0; j < m; ++j) {
          loss += anchor_coef_ / static_cast<double>(m) * head_.kl(heads.col(j), ref.col(j), &g);
          grad_head.col(j) += anchor_coef_ / static_cast<double>(m) * g;
        }
      }
      if (!std::isfinite(loss)) {
        policy_.set_params(good);
        throw TrainingFailure("PPO policy loss became non-finite", good);
      }
      VectorXd grad;
      policy_.backward(tape, grad_head, grad);
      clip_grad_norm(grad, options_.max_grad_norm);
      policy_opt_.step(policy_.params(), grad);

      Mlp::Tape vtape;
      const MatrixXd vin_b = vin(Eigen::all, idx);
      const MatrixXd v = value_.forward(vin_b, vtape);
      MatrixXd dv(1, m);
      double vloss = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const double d = v(0, j) - returns[idx[static_cast<std::size_t>(j)]];
        vloss += 0.5 * d * d;
        dv(0, j) = d / static_cast<double>(m);
      }
      if (!std::isfinite(vloss)) {
        policy_.set_params(good);
        throw TrainingFailure("PPO value loss became non-finite", good);
      }
      VectorXd vgrad;
      value_.backward(vtape, dv, vgrad);
      clip_grad_norm(vgrad, options_.max_grad_norm);
      value_opt_.step(value_.params(), vgrad);
      stats.policy_loss = loss;
      stats.value_loss = vloss / static_cast<double>(m);
    }
    stats.epochs_run = epoch + 1;
    stats.approx_kl = kl_sum / static_cast<double>(n);
    if (options_.target_kl > 0.0 && stats.approx_kl > 1.5 * options_.target_kl) break;
  }

  // Final ratios against the behavior policy.
  const MatrixXd heads = policy_.forward(rollout.observations);
  head_.evaluate(heads, rollout.actions, logp, entropy);
  std::size_t inside = 0;
  std::size_t clipped = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ratio = std::exp(logp[i] - rollout.log_probs[i]);
    if (std::abs(ratio - 1.0) <= options_.clip + 1e-12) ++inside;
    else ++clipped;
  }
  stats.ratio_in_range = static_cast<double>(inside) / static_cast<double>(n);
  stats.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
  return stats;
}

std::vector<UpdateStats> PpoAgent::train(Environment& env, std::size_t total_steps, Rng& rng, const Relabel& relabel) {
  std::vector<UpdateStats> curve;
  std::size_t done = 0;
  while (done < total_steps) {
    Rollout rollout = collect(env, std::min(options_.batch_steps, total_steps - done), rng);
    done += rollout.size();
    const auto raw = rollout.episode_returns();
    if (relabel) relabel(rollout);
    curve.push_back(update(rollout, rng));
    // Report the environment's own return, not the relabelled one.
    curve.back().mean_return = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
  }
  return curve;
}

}  // namespace iso::neural
