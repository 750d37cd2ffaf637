#include "iso/harness/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "iso/core/errors.hpp"
#include "iso/neural/checkpoint.hpp"

namespace iso::harness {
namespace {

std::filesystem::path done_marker(const std::filesystem::path& output) {
  return output.string() + ".done";
}

std::string read_marker(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string hash;
  std::getline(in, hash);
  return hash;
}

SummaryStats single_summary(const std::vector<ResultRow>& rows) {
  const auto all = summarize_results(rows);
  return all.empty() ? SummaryStats{} : all.begin()->second;
}

}  // namespace

std::string run_id(std::size_t replica) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "r%04zu", replica);
  return buf;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("ISO_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("ISO_WORKERS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

std::vector<ResultRow> run_replica(const ExperimentConfig& config, std::size_t replica) {
  const std::uint64_t seed = replica_seed(config.base_seed, replica);
  std::vector<ResultRow> rows;
  if (config.mode == Mode::Tabular) {
    WorldConfig world = config.world;
    world.seed = seed;
    const auto records = run_iso(world, config.behavior, config.irl_method, config.n_iterations, seed, config.iso);
    for (const auto& rec : records) {
      ResultRow row;
      row.run_id = run_id(replica);
      row.iteration = rec.iteration;
      row.behavior = config.behavior.name();
      row.irl_method = to_string(config.irl_method);
      row.cf = config.world.connection_factor;
      row.nf = config.behavior.noise_factor;
      row.quality = rec.quality;
      row.wall_ms = config.record_timing ? rec.diagnostics.wall_ms : 0.0;
      rows.push_back(std::move(row));
    }
  } else {
    neural::NeuralIsoConfig nc = config.neural;
    nc.world.seed = seed;
    nc.iterations = config.n_iterations;
    const auto run = neural::run_iso_neural(nc);
    if (!config.checkpoint_dir.empty()) {
      std::filesystem::create_directories(config.checkpoint_dir);
      neural::save_checkpoint(std::filesystem::path(config.checkpoint_dir) / (run_id(replica) + ".json"),
                              {neural::config_hash(nc), nc.iterations, run.system, run.user, std::nullopt});
    }
    for (const auto& rec : run.records) {
      ResultRow row;
      row.run_id = run_id(replica);
      row.iteration = rec.iteration;
      row.quality = rec.mean_return;
      row.wall_ms = config.record_timing ? rec.wall_ms : 0.0;
      row.setup = nc.setup.name();
      row.lambda = nc.lambda_kl;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const std::filesystem::path output = config.output;
  const auto marker = done_marker(output);
  const std::string hash = config_hash(config);

  ExperimentOutcome outcome;
  if (!options.force && std::filesystem::exists(marker) && std::filesystem::exists(output)) {
    if (read_marker(marker) != hash) {
      throw ConfigError(output.string() + " was produced by a different config; pass --force to overwrite");
    }
    outcome.skipped = true;
    outcome.rows = read_results(output);
    outcome.summary = single_summary(outcome.rows);
    return outcome;
  }
  std::filesystem::remove(marker);

  const std::size_t n = config.n_replicas;
  const std::size_t workers = std::max<std::size_t>(1, std::min(n, options.workers.value_or(default_workers())));
  std::vector<std::vector<ResultRow>> per_replica(n);
  std::vector<std::optional<std::string>> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < n; r = next++) {
      try {
        per_replica[r] = run_replica(config, r);
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Merge by replica index, whatever the completion order was.
  for (std::size_t r = 0; r < n; ++r) {
    if (errors[r]) {
      outcome.failures.push_back({r, *errors[r]});
      if (options.log) *options.log << "warning: replica " << r << " failed and is excluded: " << *errors[r] << '\n';
      continue;
    }
    outcome.rows.insert(outcome.rows.end(), per_replica[r].begin(), per_replica[r].end());
  }
  write_results(output, outcome.rows);
  if (outcome.failures.size() * 5 > n) {
    throw ExperimentFailed(std::to_string(outcome.failures.size()) + " of " + std::to_string(n) +
                               " replicas failed (limit 20%); first error: " + outcome.failures.front().message,
                           outcome.failures);
  }
  std::ofstream(marker) << hash << '\n';
  outcome.summary = single_summary(outcome.rows);
  return outcome;
}

}  // namespace iso::harness
