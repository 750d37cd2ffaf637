#include "iso/neural/mlp.hpp"

#include <cmath>
#include <string>

#include "iso/core/errors.hpp"

namespace iso::neural {

Mlp::Mlp(std::vector<std::size_t> sizes, Activation hidden) : sizes_(std::move(sizes)), hidden_(hidden) {
  if (sizes_.size() < 2) throw ConfigError("an MLP needs at least an input and an output size");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw ConfigError("MLP layer sizes must be positive");
    offsets_.push_back(total);
    total += sizes_[l + 1] * (sizes_[l] + 1);
  }
  params_ = VectorXd::Zero(static_cast<Eigen::Index>(total));
}

void Mlp::set_params(const VectorXd& p) {
  if (p.size() != params_.size()) {
    throw SizeError("parameter vector has " + std::to_string(p.size()) + " entries, expected " +
                    std::to_string(params_.size()));
  }
  params_ = p;
}

void Mlp::init_glorot(Rng& rng, double output_scale) {
  params_.setZero();
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
    const double scale = l + 1 == n_layers() ? output_scale : 1.0;
    const std::size_t n = sizes_[l] * sizes_[l + 1];
    for (std::size_t i = 0; i < n; ++i) {
      params_[static_cast<Eigen::Index>(weight_offset(l) + i)] = scale * bound * (2.0 * uniform01(rng) - 1.0);
    }
  }
}

void Mlp::init_uniform(Rng& rng, double bound) {
  for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = bound * (2.0 * uniform01(rng) - 1.0);
}

Eigen::Map<const MatrixXd> Mlp::weight(std::size_t layer) const {
  return {params_.data() + weight_offset(layer), static_cast<Eigen::Index>(sizes_[layer + 1]),
          static_cast<Eigen::Index>(sizes_[layer])};
}

Eigen::Map<const VectorXd> Mlp::bias(std::size_t layer) const {
  return {params_.data() + bias_offset(layer), static_cast<Eigen::Index>(sizes_[layer + 1])};
}

MatrixXd Mlp::forward(const MatrixXd& x) const {
  Tape tape;
  return forward(x, tape);
}

MatrixXd Mlp::forward(const MatrixXd& x, Tape& tape) const {
  if (static_cast<std::size_t>(x.rows()) != input_size()) {
    throw SizeError("MLP input has " + std::to_string(x.rows()) + " rows, expected " + std::to_string(input_size()));
  }
  tape.values.resize(n_layers() + 1);
  tape.values[0] = x;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    MatrixXd z = weight(l) * tape.values[l];
    z.colwise() += bias(l);
    if (activation(l) == Activation::Tanh) z = z.array().tanh().matrix();
    tape.values[l + 1] = std::move(z);
  }
  return tape.values.back();
}

VectorXd Mlp::forward_one(const VectorXd& x) const {
  VectorXd h = x;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    VectorXd z = weight(l) * h + bias(l);
    if (activation(l) == Activation::Tanh) z = z.array().tanh().matrix();
    h = std::move(z);
  }
  return h;
}

MatrixXd Mlp::backward(const Tape& tape, const MatrixXd& grad_output, VectorXd& grad) const {
  if (grad.size() == 0) grad = VectorXd::Zero(params_.size());
  if (grad.size() != params_.size()) throw SizeError("gradient buffer does not match the parameter count");
  MatrixXd delta = grad_output;
  for (std::size_t l = n_layers(); l-- > 0;) {
    if (activation(l) == Activation::Tanh) {
      delta = (delta.array() * (1.0 - tape.values[l + 1].array().square())).matrix();
    }
    const auto rows = static_cast<Eigen::Index>(sizes_[l + 1]);
    const auto cols = static_cast<Eigen::Index>(sizes_[l]);
    Eigen::Map<MatrixXd> gw(grad.data() + weight_offset(l), rows, cols);
    Eigen::Map<VectorXd> gb(grad.data() + bias_offset(l), rows);
    gw.noalias() += delta * tape.values[l].transpose();
    gb += delta.rowwise().sum();
    delta = weight(l).transpose() * delta;
  }
  return delta;
}

Adam::Adam(std::size_t n, Options options)
    : options_(options), m_(VectorXd::Zero(static_cast<Eigen::Index>(n))), v_(VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

void Adam::step(VectorXd& params, const VectorXd& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) throw SizeError("Adam state does not match parameters");
  ++t_;
  m_ = options_.beta1 * m_ + (1.0 - options_.beta1) * grad;
  v_ = options_.beta2 * v_ + (1.0 - options_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  params.array() -= options_.learning_rate * (m_.array() / c1) / ((v_.array() / c2).sqrt() + options_.epsilon);
}

double clip_grad_norm(VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm && norm > 0.0) grad *= max_norm / norm;
  return norm;
}

}  // namespace iso::neural
