#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iso/harness/stats.hpp"

namespace iso::harness {

// One CSV schema for both modes. Tabular rows leave setup and lambda empty;
// neural rows leave behavior, irl_method, cf and nf empty and store the
// average return in the quality column.
inline constexpr const char* kResultsHeader = "run_id,iteration,behavior,irl_method,cf,nf,quality,wall_ms,setup,lambda";

struct ResultRow {
  std::string run_id;
  std::size_t iteration = 0;
  std::string behavior;
  std::string irl_method;
  std::optional<std::size_t> cf;
  std::optional<double> nf;
  double quality = 0.0;
  double wall_ms = 0.0;
  std::string setup;
  std::optional<double> lambda;

  /// Rows of one curve share this key.
  std::string curve_key() const;
};

std::string format_row(const ResultRow& row);
ResultRow parse_row(const std::string& line);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

/// Rows grouped by curve, then by run_id, ordered by iteration.
std::map<std::string, std::map<std::string, std::vector<ResultRow>>> group_curves(const std::vector<ResultRow>& rows);

/// Per-curve statistics; runs with fewer iterations than the longest run of
/// their curve are dropped.
std::map<std::string, SummaryStats> summarize_results(const std::vector<ResultRow>& rows);

}  // namespace iso::harness
