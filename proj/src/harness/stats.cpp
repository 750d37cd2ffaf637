#include "iso/harness/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "iso/core/errors.hpp"

namespace iso::harness {

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sem(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

TTestResult paired_t_test(std::span<const double> before, std::span<const double> after) {
  if (before.size() != after.size()) throw InvariantViolation("paired t-test needs equally long samples");
  TTestResult r;
  const std::size_t n = before.size();
  if (n < 2) {
    r.defined = false;
    r.degenerate = true;
    r.t = std::numeric_limits<double>::quiet_NaN();
    r.p_two_sided = r.p_greater = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = after[i] - before[i];
  const double m = mean(d);
  double ss = 0.0;
  for (double x : d) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  r.df = static_cast<double>(n - 1);
  // Exactly constant differences: rounding noise in the deviations counts as zero.
  const double scale = std::max(1.0, std::abs(m));
  if (sd <= 1e-14 * scale) {
    r.degenerate = true;
    if (std::abs(m) <= 1e-14 * scale) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
      r.p_greater = 0.5;
    } else {
      r.t = m > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
      r.p_greater = m > 0 ? 0.0 : 1.0;
    }
    return r;
  }
  r.t = m / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(r.df);
  r.p_two_sided = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.p_greater = boost::math::cdf(boost::math::complement(dist, r.t));
  return r;
}

SummaryStats summarize(const std::vector<std::vector<double>>& values) {
  SummaryStats s;
  if (values.empty()) return s;
  const std::size_t k = values.front().size();
  for (const auto& row : values) {
    if (row.size() != k) throw InvariantViolation("replicas have different iteration counts");
  }
  if (k == 0) return s;
  std::vector<double> column(values.size());
  for (std::size_t it = 0; it < k; ++it) {
    for (std::size_t r = 0; r < values.size(); ++r) column[r] = values[r][it];
    s.mean.push_back(mean(column));
    s.sem.push_back(sem(column));
    s.count.push_back(values.size());
  }
  s.improvement_ratio = s.mean.back() / s.mean.front();
  std::vector<double> first(values.size()), last(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    first[r] = values[r].front();
    last[r] = values[r].back();
  }
  s.test = paired_t_test(first, last);
  return s;
}

}  // namespace iso::harness
