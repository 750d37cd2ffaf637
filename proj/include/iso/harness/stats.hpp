#pragma once

#include <span>
#include <vector>

namespace iso::harness {

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
  /// One-sided p for the alternative mean(after - before) > 0.
  double p_greater = 0.5;
  /// Zero-variance differences (t infinite or 0/0) or fewer than two pairs.
  bool degenerate = false;
  bool defined = true;  ///< false with fewer than two pairs
};

/// Paired t-test on after - before.
TTestResult paired_t_test(std::span<const double> before, std::span<const double> after);

double mean(std::span<const double> xs);
/// Sample standard deviation / sqrt(n); 0 for n < 2.
double sem(std::span<const double> xs);

struct SummaryStats {
  std::vector<double> mean;  ///< per iteration
  std::vector<double> sem;
  std::vector<std::size_t> count;
  double improvement_ratio = 1.0;  ///< final mean / initial mean
  TTestResult test;                ///< initial vs final, paired by replica
};

/// values[r][k]: quality of replica r at iteration k. All replicas must have
/// the same number of iterations.
SummaryStats summarize(const std::vector<std::vector<double>>& values);

}  // namespace iso::harness
