#pragma once

#include <Eigen/Dense>

#include "iso/core/random.hpp"

namespace iso::neural {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Categorical over logits.
VectorXd log_softmax(const VectorXd& logits);
std::size_t sample_categorical(const VectorXd& logits, Rng& rng);
double categorical_entropy(const VectorXd& logits);

// Diagonal Gaussian read from a network head of size 2d: the first d entries
// are the mean, the last d are squashed into a bounded log-variance
//   log_var = lo + (hi - lo) * sigmoid(raw).
struct LogVarBounds {
  double lo = -5.0;
  double hi = 2.0;
};

struct DiagGaussian {
  VectorXd mean;
  VectorXd log_var;

  std::size_t dim() const { return static_cast<std::size_t>(mean.size()); }
  double log_density(const VectorXd& x) const;
  double entropy() const;
  VectorXd sample(Rng& rng) const;
};

DiagGaussian gaussian_from_head(const VectorXd& head, LogVarBounds bounds = {});

/// KL(p || q) in closed form.
double kl_divergence(const DiagGaussian& p, const DiagGaussian& q);

// Policy head shared by PPO and AIRL. Actions are stored as vectors: a
// categorical action is a length-1 vector holding the index.
class PolicyHead {
 public:
  enum class Kind { Categorical, Gaussian };

  static PolicyHead categorical(std::size_t n_actions) { return {Kind::Categorical, n_actions, {}}; }
  static PolicyHead gaussian(std::size_t dim, LogVarBounds bounds = {}) { return {Kind::Gaussian, dim, bounds}; }

  Kind kind() const { return kind_; }
  /// Number of actions (categorical) or action dimension (Gaussian).
  std::size_t size() const { return size_; }
  std::size_t output_size() const { return kind_ == Kind::Categorical ? size_ : 2 * size_; }
  std::size_t action_size() const { return kind_ == Kind::Categorical ? 1 : size_; }
  LogVarBounds bounds() const { return bounds_; }

  VectorXd sample(const VectorXd& head, Rng& rng) const;
  /// Most likely action.
  VectorXd mode(const VectorXd& head) const;
  double log_prob(const VectorXd& head, const VectorXd& action) const;
  double entropy(const VectorXd& head) const;
  /// KL(current || reference) between the distributions of two heads. When
  /// `grad` is given it receives d/dhead of the KL w.r.t. the current head.
  double kl(const VectorXd& head, const VectorXd& reference, VectorXd* grad = nullptr) const;

  /// Per-column log-probabilities and entropies. When `grad_head` is given it
  /// receives d/dhead of sum_i (wlogp[i] * logp[i] + went * entropy[i]).
  void evaluate(const MatrixXd& heads, const MatrixXd& actions, VectorXd& logp, VectorXd& entropy,
                const VectorXd* wlogp = nullptr, double went = 0.0, MatrixXd* grad_head = nullptr) const;

 private:
  PolicyHead(Kind kind, std::size_t size, LogVarBounds bounds) : kind_(kind), size_(size), bounds_(bounds) {}

  Kind kind_ = Kind::Categorical;
  std::size_t size_ = 0;
  LogVarBounds bounds_;
};

}  // namespace iso::neural
