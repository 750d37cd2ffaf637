#include "iso/neural/distributions.hpp"

#include <cmath>
#include <string>

#include "iso/core/errors.hpp"

namespace iso::neural {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

VectorXd log_softmax(const VectorXd& logits) {
  const double peak = logits.maxCoeff();
  const double lse = peak + std::log((logits.array() - peak).exp().sum());
  return (logits.array() - lse).matrix();
}

std::size_t sample_categorical(const VectorXd& logits, Rng& rng) {
  const VectorXd p = log_softmax(logits).array().exp().matrix();
  return sample_index(std::vector<double>(p.data(), p.data() + p.size()), rng);
}

double categorical_entropy(const VectorXd& logits) {
  const VectorXd lp = log_softmax(logits);
  return -(lp.array().exp() * lp.array()).sum();
}

double DiagGaussian::log_density(const VectorXd& x) const {
  const auto z2 = (x - mean).array().square() * (-log_var.array()).exp();
  return -0.5 * (z2 + log_var.array() + kLog2Pi).sum();
}

double DiagGaussian::entropy() const { return 0.5 * (log_var.array() + kLog2Pi + 1.0).sum(); }

VectorXd DiagGaussian::sample(Rng& rng) const {
  VectorXd x(mean.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = mean[i] + std::exp(0.5 * log_var[i]) * standard_normal(rng);
  return x;
}

DiagGaussian gaussian_from_head(const VectorXd& head, LogVarBounds bounds) {
  if (head.size() % 2 != 0) throw SizeError("Gaussian head must have even length");
  const Eigen::Index d = head.size() / 2;
  DiagGaussian g;
  g.mean = head.head(d);
  g.log_var.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) g.log_var[i] = bounds.lo + (bounds.hi - bounds.lo) * sigmoid(head[d + i]);
  return g;
}

double kl_divergence(const DiagGaussian& p, const DiagGaussian& q) {
  if (p.mean.size() != q.mean.size()) throw SizeError("KL between Gaussians of different dimension");
  const auto var_ratio = (p.log_var - q.log_var).array().exp();
  const auto shift = (p.mean - q.mean).array().square() * (-q.log_var.array()).exp();
  return 0.5 * (var_ratio + shift - 1.0 - (p.log_var - q.log_var).array()).sum();
}

VectorXd PolicyHead::sample(const VectorXd& head, Rng& rng) const {
  if (kind_ == Kind::Categorical) return VectorXd::Constant(1, static_cast<double>(sample_categorical(head, rng)));
  return gaussian_from_head(head, bounds_).sample(rng);
}

VectorXd PolicyHead::mode(const VectorXd& head) const {
  if (kind_ == Kind::Categorical) {
    Eigen::Index best = 0;
    head.maxCoeff(&best);
    return VectorXd::Constant(1, static_cast<double>(best));
  }
  return head.head(static_cast<Eigen::Index>(size_));
}

double PolicyHead::log_prob(const VectorXd& head, const VectorXd& action) const {
  if (kind_ == Kind::Categorical) return log_softmax(head)[static_cast<Eigen::Index>(action[0])];
  return gaussian_from_head(head, bounds_).log_density(action);
}

double PolicyHead::entropy(const VectorXd& head) const {
  if (kind_ == Kind::Categorical) return categorical_entropy(head);
  return gaussian_from_head(head, bounds_).entropy();
}

double PolicyHead::kl(const VectorXd& head, const VectorXd& reference, VectorXd* grad) const {
  if (static_cast<std::size_t>(head.size()) != output_size() || reference.size() != head.size()) {
    throw SizeError("KL between heads of different size");
  }
  if (kind_ == Kind::Categorical) {
    const VectorXd lp = log_softmax(head);
    const VectorXd lq = log_softmax(reference);
    const VectorXd p = lp.array().exp().matrix();
    const double kl = (p.array() * (lp - lq).array()).sum();
    if (grad) *grad = (p.array() * ((lp - lq).array() - kl)).matrix();
    return kl;
  }
  const Eigen::Index d = static_cast<Eigen::Index>(size_);
  const DiagGaussian p = gaussian_from_head(head, bounds_);
  const DiagGaussian q = gaussian_from_head(reference, bounds_);
  if (grad) {
    grad->resize(head.size());
    const VectorXd inv_q = (-q.log_var.array()).exp().matrix();
    grad->head(d) = (p.mean - q.mean).cwiseProduct(inv_q);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double s = sigmoid(head[d + j]);
      (*grad)[d + j] = 0.5 * (std::exp(p.log_var[j]) * inv_q[j] - 1.0) * (bounds_.hi - bounds_.lo) * s * (1.0 - s);
    }
  }
  return kl_divergence(p, q);
}

void PolicyHead::evaluate(const MatrixXd& heads, const MatrixXd& actions, VectorXd& logp, VectorXd& entropy,
                          const VectorXd* wlogp, double went, MatrixXd* grad_head) const {
  const Eigen::Index n = heads.cols();
  if (static_cast<std::size_t>(heads.rows()) != output_size() || actions.cols() != n) {
    throw SizeError("policy head batch has shape " + std::to_string(heads.rows()) + "x" + std::to_string(n));
  }
  logp.resize(n);
  entropy.resize(n);
  if (grad_head) grad_head->setZero(heads.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = wlogp ? (*wlogp)[i] : 0.0;
    if (kind_ == Kind::Categorical) {
      const VectorXd lp = log_softmax(heads.col(i));
      const VectorXd p = lp.array().exp().matrix();
      const auto a = static_cast<Eigen::Index>(actions(0, i));
      logp[i] = lp[a];
      entropy[i] = -(p.array() * lp.array()).sum();
      if (grad_head) {
        auto g = grad_head->col(i);
        g = -w * p;
        g[a] += w;
        g.array() += went * (-p.array() * (lp.array() + entropy[i]));
      }
    } else {
      const Eigen::Index d = static_cast<Eigen::Index>(size_);
      const DiagGaussian dist = gaussian_from_head(heads.col(i), bounds_);
      const VectorXd diff = actions.col(i) - dist.mean;
      const VectorXd inv_var = (-dist.log_var.array()).exp().matrix();
      logp[i] = -0.5 * (diff.array().square() * inv_var.array() + dist.log_var.array() + kLog2Pi).sum();
      entropy[i] = dist.entropy();
      if (grad_head) {
        auto g = grad_head->col(i);
        g.head(d) = w * diff.cwiseProduct(inv_var);
        for (Eigen::Index j = 0; j < d; ++j) {
          const double s = sigmoid(heads(d + j, i));
          const double dlv = (bounds_.hi - bounds_.lo) * s * (1.0 - s);
          const double dlogp = 0.5 * (diff[j] * diff[j] * inv_var[j] - 1.0);
          g[d + j] = (w * dlogp + went * 0.5) * dlv;
        }
      }
    }
  }
}

}  // namespace iso::neural
