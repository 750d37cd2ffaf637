// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance --criterion 3
//   acceptance            (all of them)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iso/behavior/behavior.hpp"
#include "iso/harness/config.hpp"
#include "iso/harness/stats.hpp"
#include "iso/irl/dm_irl.hpp"
#include "iso/irl/maxent.hpp"
#include "iso/mdp/solvers.hpp"
#include "iso/neural/distributions.hpp"
#include "iso/neural/mlp.hpp"
#include "iso/neural/neural_iso.hpp"
#include "iso/optimizer/iso.hpp"
#include "iso/optimizer/mdp_plus.hpp"
#include "support.hpp"

using namespace iso;
using namespace iso::test;
using harness::paired_t_test;
using harness::replica_seed;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail_if(bool bad, const std::string& why) {
    if (bad) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double mean_of(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); }

// 1 ----------------------------------------------------------------------

Verdict mdp_plus_equivalence() {
  Verdict v;
  Rng pick(2024);
  double worst = 0.0;
  for (std::uint64_t w = 0; w < 200; ++w) {
    const std::size_t ns = 1 + pick() % 6, na = 1 + pick() % 4;
    const std::size_t cf = 1 + pick() % ns;
    const auto sys = sample_system({.n_states = ns, .n_actions = na, .connection_factor = cf, .seed = 7000 + w});
    const auto pi = random_policy(ns, na, 9000 + w);
    Rng rng(w);
    std::vector<double> r(ns);
    for (double& x : r) x = 2.0 * uniform01(rng) - 1.0;
    const RewardModel reward(r);
    const ReformulatedMdp mdp(sys, pi, reward, 0.9);
    const double plus = mdp_plus_expected_value(mdp, mdp_plus_policy_value(mdp, as_system_policy(sys), 1e-12));
    const double original = expected_state_value(sys, pi, reward, 0.9, 1e-12);
    worst = std::max(worst, std::abs(plus - original));
  }
  v.fail_if(worst > 1e-8, fmt("max |diff| %.3g > 1e-8", worst));
  v.detail = fmt("200 worlds, max |V - V+| = %.3g", worst) + (v.pass ? "" : "; " + v.detail);
  return v;
}

// 2 ----------------------------------------------------------------------

Verdict oracle_monotonicity() {
  Verdict v;
  double worst_drop = 0.0;
  std::size_t runs = 0;
  for (std::size_t cf : {2u, 8u, 32u}) {
    for (std::uint64_t w = 0; w < 10; ++w) {
      const auto seed = replica_seed(100 + cf, w);
      for (auto [behavior, method] : {std::pair{"Optimal", IrlMethod::Oracle}, std::pair{"IRL-labelled", IrlMethod::DmIrl}}) {
        const auto records = run_iso({.connection_factor = cf, .seed = seed}, BehaviorType::parse(behavior), method, 30, seed);
        ++runs;
        for (std::size_t k = 1; k < records.size(); ++k) {
          const double drop = records[k - 1].quality - records[k].quality;
          worst_drop = std::max(worst_drop, drop);
          v.fail_if(drop > 1e-6, fmt("cf %zu world %llu %s: drop %.3g at iteration %zu", cf,
                                     static_cast<unsigned long long>(w), to_string(method).c_str(), drop, k));
        }
      }
    }
  }
  const std::string head = fmt("%zu runs x 30 iterations, largest drop %.3g (slack 1e-6)", runs, worst_drop);
  v.detail = v.pass ? head : head + "; " + v.detail;
  return v;
}

// 3, 4 -------------------------------------------------------------------

struct Cell {
  std::vector<double> initial, final;
  double ratio() const { return mean_of(final) / mean_of(initial); }
};

Cell run_cell(std::size_t cf, const std::string& behavior, IrlMethod method) {
  Cell c;
  const std::uint64_t base = 0;
  for (std::size_t r = 0; r < 10; ++r) {
    const auto seed = replica_seed(base, r);
    const auto records = run_iso({.connection_factor = cf, .seed = seed}, BehaviorType::parse(behavior), method, 30, seed);
    c.initial.push_back(records.front().quality);
    c.final.push_back(records.back().quality);
  }
  return c;
}

Verdict improvement_ratios() {
  Verdict v;
  struct Target {
    std::size_t cf;
    std::string behavior;
    IrlMethod method;
    double min_ratio;
  };
  const std::vector<Target> targets{{32, "IRL-labelled", IrlMethod::DmIrl, 2.0}, {8, "IRL-labelled", IrlMethod::DmIrl, 1.7},
                                    {2, "IRL-labelled", IrlMethod::DmIrl, 1.25}, {32, "Optimal", IrlMethod::MaxEnt, 1.4},
                                    {8, "Optimal", IrlMethod::MaxEnt, 1.5},      {2, "Optimal", IrlMethod::MaxEnt, 1.2}};
  std::string cells;
  for (const auto& t : targets) {
    const auto c = run_cell(t.cf, t.behavior, t.method);
    const auto test = paired_t_test(c.initial, c.final);
    const double ratio = c.ratio();
    cells += fmt("%s%s/%s cf %zu ratio %.3f (min %.2f) p %.2g", cells.empty() ? "" : "; ", t.behavior.c_str(),
                 to_string(t.method).c_str(), t.cf, ratio, t.min_ratio, test.p_two_sided);
    v.fail_if(!(ratio >= t.min_ratio), fmt("%s cf %zu ratio %.3f < %.2f", t.behavior.c_str(), t.cf, ratio, t.min_ratio));
    v.fail_if(!(test.p_two_sided < 0.05), fmt("%s cf %zu p %.3g", t.behavior.c_str(), t.cf, test.p_two_sided));
  }
  v.detail = v.pass ? cells : cells + " | " + v.detail;
  return v;
}

Verdict noise_ordering() {
  Verdict v;
  const double labelled = mean_of(run_cell(32, "IRL-labelled", IrlMethod::DmIrl).final);
  const double mb2 = mean_of(run_cell(32, "SubOptimal-0.2-MB", IrlMethod::MaxEnt).final);
  const double mb6 = mean_of(run_cell(32, "SubOptimal-0.6-MB", IrlMethod::MaxEnt).final);
  v.detail = fmt("cf 32 final means: IRL-labelled %.4f, MB 0.2 %.4f, MB 0.6 %.4f", labelled, mb2, mb6);
  v.fail_if(!(labelled > mb2), "IRL-labelled does not exceed MB 0.2");
  v.fail_if(!(mb2 > mb6), "MB 0.2 does not exceed MB 0.6");
  return v;
}

// 5 ----------------------------------------------------------------------

Verdict dm_irl_exactness() {
  Verdict v;
  double worst = 0.0;
  std::size_t full_rank = 0, logs = 0;
  for (std::uint64_t w = 0; w < 20; ++w) {
    // Small worlds under the uniform user, default worlds under the optimal user.
    const bool small = w < 10;
    const WorldConfig cfg = small ? WorldConfig{.n_states = 16, .n_actions = 4, .connection_factor = 4, .seed = w}
                                  : WorldConfig{.connection_factor = 8, .seed = w};
    const auto world = sample_world(cfg);
    const Policy user = small ? Policy::uniform(cfg.n_states, cfg.n_actions)
                              : optimal_user_policy(world.system, world.reward, 0.9);
    const auto log = score_trajectories(sample_trajectories(world.system, user, 2000, {30, 40}, 50 + w), world.reward, 0.9);
    const auto result = dm_irl(log, cfg.n_states, 0.9);
    ++logs;
    if (result.rank_deficient) continue;
    ++full_rank;
    for (std::size_t s = 0; s < cfg.n_states; ++s) worst = std::max(worst, std::abs(result.reward(s) - world.reward(s)));
  }
  v.detail = fmt("%zu/%zu full-rank logs, max |theta - theta*| = %.3g", full_rank, logs, worst);
  v.fail_if(full_rank == 0, "no full-rank log");
  v.fail_if(worst > 1e-6, "error above 1e-6");
  return v;
}

// 6 ----------------------------------------------------------------------

Verdict maxent_micro() {
  Verdict v;
  double worst_tv = 0.0, worst_fd = 0.0;
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const auto sys = random_dense(3, 2, 31 + inst);
    const auto log = sample_trajectories(sys, random_policy(3, 2, 7 + inst), 500, {3, 3}, 8 + inst);
    MaxEntOptions opts;
    opts.horizon = 3;
    opts.iterations = 2000;
    opts.learning_rate = 0.5;
    const auto learned = maxent_irl(log, sys, opts);
    const auto reference = fit_by_enumeration(sys, log, 0.5, 4000);
    worst_tv = std::max(worst_tv, total_variation(enumerated_model(learned.reward.weights(), sys, log),
                                                  enumerated_model(reference, sys, log)));

    Rng rng(inst);
    std::vector<double> theta(3);
    for (double& t : theta) t = 2.0 * uniform01(rng) - 1.0;
    const auto g = maxent_gradient(theta, log, sys, 3);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      auto up = theta, down = theta;
      up[k] += 1e-5;
      down[k] -= 1e-5;
      const double fd = (maxent_log_likelihood(up, log, sys, 3) - maxent_log_likelihood(down, log, sys, 3)) / 2e-5;
      diff += (g[k] - fd) * (g[k] - fd);
      norm += fd * fd;
    }
    worst_fd = std::max(worst_fd, std::sqrt(diff / std::max(norm, 1e-24)));
  }
  v.detail = fmt("5 instances: max TV %.3g (< 1e-3), max relative gradient error %.3g (< 1e-4)", worst_tv, worst_fd);
  v.fail_if(worst_tv >= 1e-3, "TV too large");
  v.fail_if(worst_fd >= 1e-4, "gradient mismatch");
  return v;
}

// 7 ----------------------------------------------------------------------

Verdict neural_trends() {
  using namespace iso::neural;
  Verdict v;
  auto run = [](const std::string& setup, double lambda, std::uint64_t seed) {
    NeuralIsoConfig c;
    c.world.state_dim = 10;
    c.world.seed = seed;
    c.setup = Setup::parse(setup);
    c.lambda_kl = lambda;
    c.iterations = 3;
    c.expert_trajectories = 2000;
    const auto records = run_iso_neural(c).records;
    return std::pair{records.front().mean_return, records.back().mean_return};
  };
  std::string cells;
  std::vector<double> loose_final;
  for (const std::string setup : {"oracle-oracle", "airl-oracle", "airl-airl"}) {
    std::vector<double> before, after;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto [b, a] = run(setup, 0.001, replica_seed(0, s));
      before.push_back(b);
      after.push_back(a);
    }
    if (setup == "oracle-oracle") loose_final = after;
    const auto test = paired_t_test(before, after);
    cells += fmt("%s %.2f -> %.2f (p %.2g); ", setup.c_str(), mean_of(before), mean_of(after), test.p_greater);
    v.fail_if(!(mean_of(after) > mean_of(before) && test.p_greater < 0.05), setup + " did not improve significantly");
  }
  std::vector<double> tight_final;
  for (std::uint64_t s = 0; s < 5; ++s) tight_final.push_back(run("oracle-oracle", 0.1, replica_seed(0, s)).second);
  cells += fmt("oracle-oracle final: lambda 0.001 %.2f, lambda 0.1 %.2f", mean_of(loose_final), mean_of(tight_final));
  v.fail_if(!(mean_of(loose_final) >= mean_of(tight_final)), "lambda 0.001 below lambda 0.1");
  v.detail = v.pass ? cells : cells + " | " + v.detail;
  return v;
}

// 8 ----------------------------------------------------------------------

template <class F>
double fd_error(F loss, Eigen::VectorXd x, const Eigen::VectorXd& analytic) {
  Eigen::VectorXd fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + 1e-6;
    const double up = loss(x);
    x[i] = keep - 1e-6;
    const double down = loss(x);
    x[i] = keep;
    fd[i] = (up - down) / 2e-6;
  }
  return (analytic - fd).norm() / std::max(1e-12, fd.norm());
}

Verdict numerical_hygiene() {
  using namespace iso::neural;
  Verdict v;
  double worst_grad = 0.0;
  Rng rng(5);
  const std::vector<std::vector<std::size_t>> shapes{{3, 4, 2}, {5, 7, 6, 3}, {10, 64, 64, 1}, {20, 64, 64, 20}};
  for (const auto& shape : shapes) {
    for (Activation act : {Activation::Tanh, Activation::Identity}) {
      Mlp net(shape, act);
      net.init_glorot(rng);
      const Eigen::Index n = 4;
      const Eigen::MatrixXd x = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(shape.front()), n);
      const Eigen::MatrixXd w = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(shape.back()), n);
      Mlp::Tape tape;
      net.forward(x, tape);
      Eigen::VectorXd grad;
      const Eigen::MatrixXd dx = net.backward(tape, w, grad);
      worst_grad = std::max(worst_grad, fd_error(
                                            [&](const Eigen::VectorXd& p) {
                                              Mlp copy = net;
                                              copy.set_params(p);
                                              return (copy.forward(x).array() * w.array()).sum();
                                            },
                                            net.params(), grad));
      worst_grad = std::max(worst_grad, fd_error(
                                            [&](const Eigen::VectorXd& flat) {
                                              return (net.forward(flat.reshaped(x.rows(), n)).array() * w.array()).sum();
                                            },
                                            x.reshaped(), dx.reshaped()));
    }
  }
  for (const auto& head : {PolicyHead::categorical(5), PolicyHead::gaussian(4)}) {
    const Eigen::Index n = 6;
    const Eigen::MatrixXd heads = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(head.output_size()), n);
    Eigen::MatrixXd actions(static_cast<Eigen::Index>(head.action_size()), n);
    for (Eigen::Index i = 0; i < n; ++i) actions.col(i) = head.sample(heads.col(i), rng);
    const Eigen::VectorXd wl = Eigen::VectorXd::Random(n);
    Eigen::VectorXd logp, ent;
    Eigen::MatrixXd grad;
    head.evaluate(heads, actions, logp, ent, &wl, 0.3, &grad);
    worst_grad = std::max(worst_grad, fd_error(
                                          [&](const Eigen::VectorXd& flat) {
                                            Eigen::VectorXd lp, en;
                                            head.evaluate(flat.reshaped(heads.rows(), n), actions, lp, en);
                                            return wl.dot(lp) + 0.3 * en.sum();
                                          },
                                          heads.reshaped(), grad.reshaped()));
    const Eigen::VectorXd ref = Eigen::VectorXd::Random(heads.rows());
    Eigen::VectorXd kl_grad;
    head.kl(heads.col(0), ref, &kl_grad);
    worst_grad = std::max(worst_grad, fd_error([&](const Eigen::VectorXd& h) { return head.kl(h, ref); },
                                               Eigen::VectorXd(heads.col(0)), kl_grad));
  }
  v.fail_if(worst_grad >= 1e-4, fmt("gradient error %.3g", worst_grad));

  // Normalization of every stochastic object the library builds.
  double worst_mass = 0.0;
  auto mass = [&](std::span<const double> p) {
    double total = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) worst_mass = std::max(worst_mass, 1.0);
      total += x;
    }
    worst_mass = std::max(worst_mass, std::abs(total - 1.0));
  };
  for (std::uint64_t w = 0; w < 20; ++w) {
    const auto world = sample_world({.connection_factor = 1 + w % 8 * 4, .seed = w});
    const auto& sys = world.system;
    mass(sys.initial_distribution());
    for (StateIndex s = 0; s < sys.n_states(); ++s)
      for (ActionIndex a = 0; a < sys.n_actions(); ++a) mass(sys.transition_row(s, a));
    const auto user = optimal_user_policy(sys, world.reward, 0.9);
    const auto noisy = adversarial_policy(user);
    for (StateIndex s = 0; s < sys.n_states(); ++s) {
      mass(user.row(s));
      mass(noisy.row(s));
    }
    const auto step = iso_iteration(sys, world.reward, world.reward, 0.9);
    for (StateIndex s = 0; s < sys.n_states(); ++s)
      for (ActionIndex a = 0; a < sys.n_actions(); ++a) mass(step.system.transition_row(s, a));
    const ReformulatedMdp mdp(sys, user, world.reward, 0.9);
    mass(mdp.initial_distribution());
  }
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd logits = 3.0 * Eigen::VectorXd::Random(7);
    const Eigen::VectorXd p = log_softmax(logits).array().exp();
    mass({p.data(), static_cast<std::size_t>(p.size())});
  }
  // 1-d Gaussian head: midpoint rule over +-12 sd.
  const auto g1 = PolicyHead::gaussian(1);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd head = 2.0 * Eigen::VectorXd::Random(2);
    const auto d = gaussian_from_head(head);
    const double sd = std::exp(0.5 * d.log_var[0]);
    const double lo = d.mean[0] - 12 * sd, hi = d.mean[0] + 12 * sd;
    const int steps = 20000;
    const double dx = (hi - lo) / steps;
    double total = 0.0;
    for (int i = 0; i < steps; ++i) total += std::exp(g1.log_prob(head, Eigen::VectorXd::Constant(1, lo + (i + 0.5) * dx))) * dx;
    worst_mass = std::max(worst_mass, std::abs(total - 1.0));
  }
  v.fail_if(worst_mass > 1e-9, fmt("normalization error %.3g", worst_mass));
  const std::string head = fmt("max relative gradient error %.3g (< 1e-4), max normalization error %.3g", worst_grad, worst_mass);
  v.detail = v.pass ? head : head + "; " + v.detail;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> which;
  app.add_option("-c,--criterion", which, "criterion numbers (default: all)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"MDP+ equivalence", mdp_plus_equivalence},     {"oracle monotonicity", oracle_monotonicity},
      {"improvement ratios", improvement_ratios},     {"noise ordering", noise_ordering},
      {"DM-IRL exactness", dm_irl_exactness},         {"MaxEnt micro-scale correctness", maxent_micro},
      {"neural trends", neural_trends},               {"numerical hygiene", numerical_hygiene}};
  bool all = true;
  for (int k : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k - 1].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %d %s [%s] %s (%.0fs)\n", k, v.pass ? "PASS" : "FAIL", criteria[k - 1].first,
                v.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
