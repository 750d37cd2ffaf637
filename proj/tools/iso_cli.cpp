// Command-line front end: world generation, experiment runs and result
// post-processing.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "iso/core/errors.hpp"
#include "iso/harness/experiment.hpp"
#include "iso/harness/plots.hpp"
#include "iso/world/world_io.hpp"

namespace {

using namespace iso;
using namespace iso::harness;

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kBadConfig = 2;
constexpr int kReplicaFailures = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::size_t> iterations, replicas, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  bool force = false;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "experiment config (JSON)");
  cmd->add_option("--iterations", o.iterations, "ISO iterations");
  cmd->add_option("--replicas", o.replicas, "independent replicas");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("-o,--output", o.output, "results CSV");
  cmd->add_option("--workers", o.workers, "worker threads (default $ISO_WORKERS or 1)");
  cmd->add_flag("--force", o.force, "re-run even if the output is complete");
  cmd->add_flag("--no-timing", o.no_timing, "write wall_ms as 0 for byte-identical output");
}

ExperimentConfig base_config(const Overrides& o, Mode mode) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.config_path.empty()) c.mode = mode;
  if (c.mode != mode) throw ConfigError("config mode is " + to_string(c.mode) + ", expected " + to_string(mode));
  if (o.iterations) c.n_iterations = *o.iterations;
  if (o.replicas) c.n_replicas = *o.replicas;
  if (o.seed) c.base_seed = *o.seed;
  if (o.output) c.output = *o.output;
  if (o.no_timing) c.record_timing = false;
  c.neural.iterations = c.n_iterations;
  return c;
}

void print_summary(const std::vector<ResultRow>& rows) {
  const auto stats = summarize_results(rows);
  if (stats.empty()) {
    std::printf("no results\n");
    return;
  }
  std::printf("%-40s %4s %12s %12s %8s %10s %12s\n", "curve", "n", "initial", "final", "ratio", "t", "p");
  for (const auto& [key, s] : stats) {
    if (s.mean.empty()) continue;
    char p[32];
    if (!s.test.defined) std::snprintf(p, sizeof(p), "undefined");
    else std::snprintf(p, sizeof(p), "%.3g%s", s.test.p_two_sided, s.test.degenerate ? "*" : "");
    std::printf("%-40s %4zu %12.4f %12.4f %8.3f %10.3f %12s\n", key.c_str(), s.count.front(), s.mean.front(),
                s.mean.back(), s.improvement_ratio, s.test.t, p);
  }
}

int run(const ExperimentConfig& config, const Overrides& o) {
  RunOptions options;
  options.workers = o.workers;
  options.force = o.force;
  options.log = &std::cerr;
  const auto outcome = run_experiment(config, options);
  if (outcome.skipped) std::fprintf(stderr, "%s is complete; nothing to do (use --force to re-run)\n", config.output.c_str());
  print_summary(outcome.rows);
  return outcome.failures.empty() ? kOk : kReplicaFailures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive system optimizer: tabular and neural simulations"};
  app.require_subcommand(1);

  WorldConfig world;
  std::string world_out = "world.json";
  auto* gen = app.add_subcommand("gen-world", "sample a tabular world and write it as JSON");
  gen->add_option("--states", world.n_states, "number of states")->capture_default_str();
  gen->add_option("--actions", world.n_actions, "number of actions")->capture_default_str();
  gen->add_option("--cf", world.connection_factor, "successors per (state, action)")->capture_default_str();
  gen->add_option("--reward-fraction", world.reward_fraction, "fraction of rewarding states")->capture_default_str();
  gen->add_option("--seed", world.seed, "world seed")->capture_default_str();
  gen->add_option("-o,--output", world_out, "output path")->capture_default_str();

  Overrides tab;
  std::optional<std::size_t> cf, trajectories;
  std::optional<std::string> behavior, irl;
  auto* tabular = app.add_subcommand("run-tabular", "run tabular ISO replicas");
  add_common(tabular, tab);
  tabular->add_option("--cf", cf, "connection factor");
  tabular->add_option("--behavior", behavior, "IRL-labelled, Optimal, SubOptimal-<nf>-MB or SubOptimal-<nf>-NB");
  tabular->add_option("--irl", irl, "oracle, dm_irl or maxent");
  tabular->add_option("--trajectories", trajectories, "trajectories per log");

  Overrides neu;
  std::optional<std::string> setup, reward;
  std::optional<double> lambda;
  std::optional<std::size_t> state_dim, expert;
  std::optional<std::string> checkpoints;
  auto* neural = app.add_subcommand("run-neural", "run neural ISO replicas");
  add_common(neural, neu);
  neural->add_option("--setup", setup, "oracle-oracle, airl-oracle or airl-airl");
  neural->add_option("--lambda", lambda, "KL penalty weight");
  neural->add_option("--reward", reward, "handcrafted or random");
  neural->add_option("--state-dim", state_dim, "state dimension");
  neural->add_option("--expert", expert, "expert trajectories per iteration");
  neural->add_option("--checkpoints", checkpoints, "directory for final networks");

  std::string results;
  auto* summarize = app.add_subcommand("summarize", "per-curve statistics of a results file");
  summarize->add_option("results", results, "results CSV")->required();

  std::string plot_results, plot_dir = "plots";
  auto* plots = app.add_subcommand("emit-plots", "per-curve CSVs (iteration, mean, sem, n)");
  plots->add_option("results", plot_results, "results CSV")->required();
  plots->add_option("-o,--out", plot_dir, "output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      world.validate();
      save_world(sample_world(world), world_out);
      std::printf("wrote %s\n", world_out.c_str());
      return kOk;
    }
    if (tabular->parsed()) {
      auto c = base_config(tab, Mode::Tabular);
      if (cf) c.world.connection_factor = *cf;
      if (behavior) c.behavior = BehaviorType::parse(*behavior);
      if (irl) c.irl_method = parse_irl_method(*irl);
      if (trajectories) c.iso.trajectories = *trajectories;
      c.validate();
      return run(c, tab);
    }
    if (neural->parsed()) {
      auto c = base_config(neu, Mode::Neural);
      if (setup) c.neural.setup = neural::Setup::parse(*setup);
      if (lambda) c.neural.lambda_kl = *lambda;
      if (reward) c.neural.world.reward = neural::parse_reward_kind(*reward);
      if (state_dim) c.neural.world.state_dim = *state_dim;
      if (expert) c.neural.expert_trajectories = *expert;
      if (checkpoints) c.checkpoint_dir = *checkpoints;
      c.validate();
      return run(c, neu);
    }
    if (summarize->parsed()) {
      print_summary(read_results(results));
      return kOk;
    }
    if (plots->parsed()) {
      const auto files = emit_plot_data(plot_results, plot_dir);
      std::printf("wrote %zu files to %s\n", files.size(), plot_dir.c_str());
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
