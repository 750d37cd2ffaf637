#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "iso/core/random.hpp"

namespace iso::neural {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Activation { Identity, Tanh };

// Fully connected network. All weights and biases live in one flat parameter
// vector so optimizers and checkpoints see a single array. Batches are
// column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  /// sizes = {input, hidden..., output}; hidden layers use `hidden`, the
  /// output layer is linear.
  Mlp(std::vector<std::size_t> sizes, Activation hidden = Activation::Tanh);

  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t n_layers() const { return sizes_.size() - 1; }
  std::size_t n_params() const { return static_cast<std::size_t>(params_.size()); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  Activation activation(std::size_t layer) const { return layer + 1 == n_layers() ? Activation::Identity : hidden_; }

  const VectorXd& params() const { return params_; }
  VectorXd& params() { return params_; }
  void set_params(const VectorXd& p);

  /// Glorot-uniform weights, zero biases; the output layer is scaled by
  /// `output_scale`.
  void init_glorot(Rng& rng, double output_scale = 1.0);
  /// Every parameter drawn from U[-bound, bound].
  void init_uniform(Rng& rng, double bound);

  Eigen::Map<const MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<const VectorXd> bias(std::size_t layer) const;

  /// Cached layer outputs for one batch, consumed by backward().
  struct Tape {
    std::vector<MatrixXd> values;  ///< values[0] is the input
  };

  MatrixXd forward(const MatrixXd& x) const;
  MatrixXd forward(const MatrixXd& x, Tape& tape) const;
  VectorXd forward_one(const VectorXd& x) const;

  /// Accumulates dLoss/dparams into `grad` (resized if empty) given
  /// dLoss/doutput. Returns dLoss/dinput.
  MatrixXd backward(const Tape& tape, const MatrixXd& grad_output, VectorXd& grad) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + sizes_[layer + 1] * sizes_[layer]; }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  Activation hidden_ = Activation::Tanh;
  VectorXd params_;
};

class Adam {
 public:
  struct Options {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam() = default;
  Adam(std::size_t n, Options options);

  /// Descent step: params -= lr * mhat / (sqrt(vhat) + eps).
  void step(VectorXd& params, const VectorXd& grad);
  std::uint64_t steps() const { return t_; }
  const Options& options() const { return options_; }

 private:
  Options options_;
  VectorXd m_, v_;
  std::uint64_t t_ = 0;
};

/// Rescales `grad` in place so its norm is at most max_norm; returns the
/// original norm.
double clip_grad_norm(VectorXd& grad, double max_norm);

}  // namespace iso::neural
