#include "iso/irl/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "iso/core/errors.hpp"

namespace iso {
namespace {

// log Z_k(s) for k = 1..horizon remaining states, row-major [k-1][s].
std::vector<double> log_partition(const std::vector<double>& theta, const TabularSystem& system,
                                  std::size_t horizon) {
  const std::size_t ns = system.n_states();
  const std::size_t na = system.n_actions();
  std::vector<double> log_z(horizon * ns);
  const double log_actions = std::log(static_cast<double>(na));
  for (StateIndex s = 0; s < ns; ++s) log_z[s] = theta[s] + log_actions;
  for (std::size_t k = 1; k < horizon; ++k) {
    const double* prev = log_z.data() + (k - 1) * ns;
    double* cur = log_z.data() + k * ns;
    const double peak = *std::max_element(prev, prev + ns);
    for (StateIndex s = 0; s < ns; ++s) {
      double acc = 0.0;
      for (ActionIndex a = 0; a < na; ++a) {
        for (StateIndex next : system.connectivity().successors(s, a)) {
          acc += system.transition(s, a, next) * std::exp(prev[next] - peak);
        }
      }
      cur[s] = theta[s] + peak + std::log(acc);
    }
  }
  return log_z;
}

void check_log(const std::vector<double>& theta, const std::vector<Trajectory>& trajectories,
               const TabularSystem& system, std::size_t horizon) {
  if (theta.size() != system.n_states()) throw InvariantViolation("theta length does not match the system");
  if (trajectories.empty()) throw InvariantViolation("maximum-entropy IRL needs at least one trajectory");
  for (const auto& trajectory : trajectories) {
    if (trajectory.steps.empty()) throw InvariantViolation("empty trajectory in log");
    if (trajectory.size() > horizon) {
      throw InvariantViolation("trajectory of length " + std::to_string(trajectory.size()) +
                               " exceeds the recursion horizon " + std::to_string(horizon));
    }
    check_feasible(trajectory, system.connectivity());
  }
}

struct Evaluation {
  double log_likelihood = 0.0;
  std::vector<double> gradient;
};

// Mean log-likelihood and its gradient from one backward and one forward pass.
Evaluation evaluate(const std::vector<double>& theta, const std::vector<Trajectory>& trajectories,
                    const TabularSystem& system, std::size_t horizon, bool with_gradient) {
  check_log(theta, trajectories, system, horizon);
  const std::size_t ns = system.n_states();
  const std::size_t na = system.n_actions();
  const auto log_z = log_partition(theta, system, horizon);
  const double n = static_cast<double>(trajectories.size());

  Evaluation out;
  double total = 0.0;
  for (const auto& trajectory : trajectories) {
    const auto& steps = trajectory.steps;
    double lp = -log_z[(steps.size() - 1) * ns + steps.front().state];
    for (std::size_t t = 0; t < steps.size(); ++t) {
      lp += theta[steps[t].state];
      if (t + 1 < steps.size()) lp += std::log(system.transition(steps[t].state, steps[t].action, steps[t + 1].state));
    }
    total += lp;
  }
  out.log_likelihood = total / n;
  if (!with_gradient) return out;

  // Start-state counts grouped by trajectory length, and empirical counts.
  std::vector<double> starts(horizon * ns, 0.0);
  std::vector<double> grad(ns, 0.0);
  for (const auto& trajectory : trajectories) {
    starts[(trajectory.size() - 1) * ns + trajectory.steps.front().state] += 1.0;
    for (const auto& step : trajectory.steps) grad[step.state] += 1.0;
  }

  // Mass with k states remaining, merged across lengths; transitions are
  // tilted by the partition function of the remainder.
  std::vector<double> mass(starts.begin() + static_cast<std::ptrdiff_t>((horizon - 1) * ns), starts.end());
  std::vector<double> next(ns);
  for (std::size_t k = horizon; k >= 1; --k) {
    for (StateIndex s = 0; s < ns; ++s) grad[s] -= mass[s];
    if (k == 1) break;
    const double* rest = log_z.data() + (k - 2) * ns;
    const double* here = log_z.data() + (k - 1) * ns;
    std::copy(starts.begin() + static_cast<std::ptrdiff_t>((k - 2) * ns),
              starts.begin() + static_cast<std::ptrdiff_t>((k - 1) * ns), next.begin());
    for (StateIndex s = 0; s < ns; ++s) {
      if (mass[s] == 0.0) continue;
      const double base = theta[s] - here[s];
      for (ActionIndex a = 0; a < na; ++a) {
        for (StateIndex t : system.connectivity().successors(s, a)) {
          const double p = system.transition(s, a, t);
          if (p > 0.0) next[t] += mass[s] * p * std::exp(base + rest[t]);
        }
      }
    }
    mass.swap(next);
  }
  for (auto& g : grad) g /= n;
  out.gradient = std::move(grad);
  return out;
}

double norm2(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

std::vector<double> maxent_gradient(const std::vector<double>& theta, const std::vector<Trajectory>& trajectories,
                                    const TabularSystem& system, std::size_t horizon) {
  return evaluate(theta, trajectories, system, horizon, true).gradient;
}

double maxent_log_likelihood(const std::vector<double>& theta, const std::vector<Trajectory>& trajectories,
                             const TabularSystem& system, std::size_t horizon) {
  return evaluate(theta, trajectories, system, horizon, false).log_likelihood;
}

double maxent_log_probability(const std::vector<double>& theta, const Trajectory& trajectory,
                              const TabularSystem& system) {
  return maxent_log_likelihood(theta, {trajectory}, system, trajectory.size());
}

MaxEntResult maxent_irl(const std::vector<Trajectory>& trajectories, const TabularSystem& system,
                        const MaxEntOptions& options) {
  if (!(options.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  std::vector<double> theta(system.n_states(), 0.0);
  std::vector<double> candidate(theta.size());
  MaxEntResult result;
  result.gradient_norms.reserve(options.iterations);
  auto current = evaluate(theta, trajectories, system, options.horizon, true);
  double rate = options.learning_rate;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const double norm = norm2(current.gradient);
    if (!std::isfinite(norm) || !std::isfinite(current.log_likelihood)) {
      throw LearningError("maximum-entropy IRL produced a non-finite gradient at iteration " + std::to_string(it));
    }
    result.gradient_norms.push_back(norm);
    if (options.divergence_window > 0 && it >= options.divergence_window) {
      const double before = result.gradient_norms[it - options.divergence_window];
      if (norm > 10.0 * before && norm > 1e-6) {
        throw LearningError("maximum-entropy IRL diverged: gradient norm " + std::to_string(before) + " -> " +
                            std::to_string(norm) + " over " + std::to_string(options.divergence_window) +
                            " iterations (learning rate " + std::to_string(options.learning_rate) + ")");
      }
    }
    // Gradient ascent at the configured rate; the step is halved while it
    // would lower the likelihood and regrows toward the configured rate.
    while (true) {
      for (std::size_t s = 0; s < theta.size(); ++s) candidate[s] = theta[s] + rate * current.gradient[s];
      auto trial = evaluate(candidate, trajectories, system, options.horizon, true);
      const double slack = 1e-12 * std::max(1.0, std::abs(current.log_likelihood));
      if (trial.log_likelihood >= current.log_likelihood - slack) {
        theta.swap(candidate);
        current = std::move(trial);
        rate = std::min(options.learning_rate, rate * 2.0);
        break;
      }
      rate *= 0.5;
      if (rate < options.learning_rate * 1e-12) {
        // No ascent direction left at machine precision: stationary.
        rate = options.learning_rate;
        break;
      }
    }
  }
  result.reward = RewardModel(std::move(theta));
  return result;
}

}  // namespace iso
