#pragma once

#include <span>
#include <vector>

#include "snl/common.hpp"

namespace snl::flow {

enum class Mode { train, eval };

// Batch normalization used as a bijection between autoregressive layers.
//
//   y = exp(log_gamma) * (x - m) / sqrt(v + eps) + beta
//   log|det| = sum_i log_gamma_i - 0.5 * log(v_i + eps)
//
// In train mode (m, v) are the batch moments and gradients flow through them;
// in eval mode the running moments are used and the map is a fixed affine one.
// Running variances start at 1 - eps so a fresh layer is the identity.
class BatchNormLayer {
 public:
  struct Cache {
    Mode mode = Mode::eval;
    Matrix xhat;
    Vector mean;
    Vector var;
  };

  BatchNormLayer() = default;
  BatchNormLayer(int dim, double momentum, double eps);

  int dim() const { return static_cast<int>(log_gamma_.rows()); }
  double momentum() const { return momentum_; }
  double eps() const { return eps_; }

  Matrix forward(const Matrix& x, Mode mode, Eigen::RowVectorXd& logdet, Cache* cache = nullptr) const;
  Matrix backward(const Cache& cache, const Matrix& grad_y, const Eigen::RowVectorXd& grad_logdet,
                  std::span<Matrix> grads) const;
  Matrix inverse(const Matrix& y) const;

  // running = momentum * running + (1 - momentum) * batch
  void absorb(const Cache& cache);
  void set_running(const Vector& mean, const Vector& var);
  const Vector& running_mean() const { return running_mean_; }
  const Vector& running_var() const { return running_var_; }

  // log_gamma, beta
  std::vector<Matrix*> parameters() { return {&log_gamma_, &beta_}; }
  std::vector<const Matrix*> parameters() const { return {&log_gamma_, &beta_}; }

 private:
  Matrix log_gamma_;  // D x 1
  Matrix beta_;       // D x 1
  Vector running_mean_;
  Vector running_var_;
  double momentum_ = 0.9;
  double eps_ = 1e-5;
};

}  // namespace snl::flow
