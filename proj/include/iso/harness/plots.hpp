#pragma once

#include <filesystem>
#include <vector>

#include "iso/harness/results.hpp"

namespace iso::harness {

inline constexpr const char* kCurveHeader = "iteration,mean,sem,n";
inline constexpr const char* kIndexHeader = "curve,file,replicas";

/// Writes one CSV per curve (iteration, mean, sem, n) plus index.csv into
/// `out_dir`. Empty input yields a header-only index. Returns the files
/// written, index first.
std::vector<std::filesystem::path> emit_plot_data(const std::vector<ResultRow>& rows,
                                                  const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& results,
                                                  const std::filesystem::path& out_dir);

}  // namespace iso::harness
