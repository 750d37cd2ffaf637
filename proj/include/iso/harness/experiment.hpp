#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iso/harness/config.hpp"
#include "iso/harness/results.hpp"

namespace iso::harness {

struct RunOptions {
  /// Worker threads; defaults to $ISO_WORKERS, then 1.
  std::optional<std::size_t> workers;
  /// Re-run even when the output is already marked complete.
  bool force = false;
  /// Warnings about failed replicas go here when set.
  std::ostream* log = nullptr;
};

struct ReplicaFailure {
  std::size_t replica = 0;
  std::string message;
};

struct ExperimentOutcome {
  bool skipped = false;  ///< finished earlier; results were only re-read
  std::vector<ResultRow> rows;
  SummaryStats summary;
  std::vector<ReplicaFailure> failures;
};

/// More than a fifth of the replicas failed.
class ExperimentFailed : public std::runtime_error {
 public:
  ExperimentFailed(const std::string& what, std::vector<ReplicaFailure> failures)
      : std::runtime_error(what), failures_(std::move(failures)) {}
  const std::vector<ReplicaFailure>& failures() const { return failures_; }

 private:
  std::vector<ReplicaFailure> failures_;
};

std::string run_id(std::size_t replica);

/// Rows for one replica.
std::vector<ResultRow> run_replica(const ExperimentConfig& config, std::size_t replica);

/// Worker count from $ISO_WORKERS, or 1.
std::size_t default_workers();

/// Runs every replica, writes config.output and a ".done" sidecar holding the
/// config hash. A completed output with the same hash is not recomputed
/// unless options.force is set.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace iso::harness
