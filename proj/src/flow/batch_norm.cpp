#include "snl/flow/batch_norm.hpp"

#include <cmath>
#include <stdexcept>

namespace snl::flow {

BatchNormLayer::BatchNormLayer(int dim, double momentum, double eps)
    : log_gamma_(Matrix::Zero(dim, 1)),
      beta_(Matrix::Zero(dim, 1)),
      running_mean_(Vector::Zero(dim)),
      running_var_(Vector::Constant(dim, 1.0 - eps)),
      momentum_(momentum),
      eps_(eps) {
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("BatchNormLayer: momentum must be in [0, 1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("BatchNormLayer: eps must be in (0, 1)");
}

Matrix BatchNormLayer::forward(const Matrix& x, Mode mode, Eigen::RowVectorXd& logdet, Cache* cache) const {
  if (x.rows() != dim()) throw std::invalid_argument("BatchNormLayer::forward: dimension mismatch");
  Vector mean, var;
  if (mode == Mode::train) {
    if (x.cols() < 2) throw std::invalid_argument("BatchNormLayer::forward: train mode needs a batch of >= 2");
    mean = x.rowwise().mean();
    var = (x.colwise() - mean).array().square().rowwise().mean();
  } else {
    mean = running_mean_;
    var = running_var_;
  }
  const Vector inv_std = (var.array() + eps_).rsqrt();
  Matrix xhat = ((x.colwise() - mean).array().colwise() * inv_std.array()).matrix();
  const Vector gain = log_gamma_.col(0).array().exp();
  Matrix y = (xhat.array().colwise() * gain.array()).matrix();
  y.colwise() += beta_.col(0);

  const double ld = log_gamma_.sum() - 0.5 * (var.array() + eps_).log().sum();
  logdet = Eigen::RowVectorXd::Constant(x.cols(), ld);
  if (cache) {
    cache->mode = mode;
    cache->xhat = std::move(xhat);
    cache->mean = std::move(mean);
    cache->var = std::move(var);
  }
  return y;
}

Matrix BatchNormLayer::backward(const Cache& cache, const Matrix& grad_y, const Eigen::RowVectorXd& grad_logdet,
                                std::span<Matrix> grads) const {
  if (grads.size() != 2) throw std::invalid_argument("BatchNormLayer::backward: gradient slot count");
  const Vector gain = log_gamma_.col(0).array().exp();
  const double total_ld = grad_logdet.sum();

  grads[0].col(0).array() += (grad_y.array() * cache.xhat.array()).rowwise().sum() * gain.array() + total_ld;
  grads[1].col(0) += grad_y.rowwise().sum();

  const Vector inv_std = (cache.var.array() + eps_).rsqrt();
  const Matrix grad_xhat = (grad_y.array().colwise() * gain.array()).matrix();
  if (cache.mode == Mode::eval) return (grad_xhat.array().colwise() * inv_std.array()).matrix();

  // Batch statistics depend on every column.
  const double n = static_cast<double>(grad_y.cols());
  const Vector mean_g = grad_xhat.rowwise().mean();
  const Vector mean_gx = (grad_xhat.array() * cache.xhat.array()).rowwise().mean();
  Matrix grad_x = grad_xhat;
  grad_x.colwise() -= mean_g;
  grad_x.array() -= cache.xhat.array().colwise() * mean_gx.array();
  grad_x.array().colwise() *= inv_std.array();

  // logdet term: d/dv [-0.5 * log(v + eps)] * dv/dx, dv/dx_b = 2 (x_b - m) / n
  //   = -0.5 / (v + eps) * 2 * xhat_b * sqrt(v + eps) / n
  const Vector coeff = -total_ld * inv_std.array() / n;
  grad_x.array() += cache.xhat.array().colwise() * coeff.array();
  return grad_x;
}

Matrix BatchNormLayer::inverse(const Matrix& y) const {
  if (y.rows() != dim()) throw std::invalid_argument("BatchNormLayer::inverse: dimension mismatch");
  const Vector std_dev = (running_var_.array() + eps_).sqrt();
  const Vector inv_gain = (-log_gamma_.col(0).array()).exp();
  Matrix x = y.colwise() - beta_.col(0);
  x.array().colwise() *= (inv_gain.array() * std_dev.array());
  x.colwise() += running_mean_;
  return x;
}

void BatchNormLayer::absorb(const Cache& cache) {
  if (cache.mode != Mode::train) return;
  running_mean_ = momentum_ * running_mean_ + (1.0 - momentum_) * cache.mean;
  running_var_ = momentum_ * running_var_ + (1.0 - momentum_) * cache.var;
}

void BatchNormLayer::set_running(const Vector& mean, const Vector& var) {
  if (mean.size() != dim() || var.size() != dim()) throw std::invalid_argument("BatchNormLayer::set_running: dimension mismatch");
  if ((var.array() <= 0.0).any()) throw std::invalid_argument("BatchNormLayer::set_running: variances must be positive");
  running_mean_ = mean;
  running_var_ = var;
}

}  // namespace snl::flow
