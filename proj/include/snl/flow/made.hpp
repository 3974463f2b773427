#pragma once

#include <span>
#include <vector>

#include "snl/common.hpp"
#include "snl/flow/masks.hpp"

namespace snl::flow {

// One conditional autoregressive bijection, parameterized by a MADE network.
//
// Density direction: u_i = (x_i - mu_i) * exp(-alpha_i), log|det| = -sum_i alpha_i,
// where (mu, alpha) are produced from x_{<i} and theta. alpha is the raw head
// output squashed smoothly into [-alpha_bound, alpha_bound].
//
// All batched methods take points as matrix columns.
class MadeLayer {
 public:
  struct Cache {
    Matrix x;
    Matrix theta;
    std::vector<Matrix> hidden;  // post-activation, one per hidden layer
    Matrix raw_alpha;
    Matrix alpha;
    Matrix scale;  // exp(-alpha)
    Matrix u;
  };

  MadeLayer() = default;
  MadeLayer(MaskSet masks, double alpha_bound);

  // Hidden weights uniform in +-1/sqrt(fan_in), output heads zero. The layer
  // starts as the identity map.
  void initialize(Rng& rng);

  const MaskSet& masks() const { return masks_; }
  int data_dim() const { return masks_.data_dim; }
  int cond_dim() const { return masks_.cond_dim; }
  double alpha_bound() const { return alpha_bound_; }

  void heads(const Matrix& x, const Matrix& theta, Matrix& mu, Matrix& alpha) const;

  // Throws std::domain_error on non-finite input.
  Matrix forward(const Matrix& x, const Matrix& theta, Eigen::RowVectorXd& logdet,
                 Cache* cache = nullptr) const;

  // Accumulates parameter gradients into `grads` (same order as parameters())
  // and returns the gradient with respect to x.
  Matrix backward(const Cache& cache, const Matrix& grad_u, const Eigen::RowVectorXd& grad_logdet,
                  std::span<Matrix> grads) const;

  // Generative direction; one network pass per degree.
  Matrix inverse(const Matrix& u, const Matrix& theta) const;

  // Trainable blocks: hidden weights, conditioner weights, hidden biases,
  // mu weights, mu bias, alpha weights, alpha bias.
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  // Mask applied to each parameter's gradient (nullptr = dense).
  std::vector<const Matrix*> gradient_masks() const;
  std::size_t parameter_count() const;

 private:
  Matrix hidden_pass(const Matrix& x, const Matrix& theta, std::vector<Matrix>* hidden) const;
  Matrix squash(const Matrix& raw) const;

  MaskSet masks_;
  double alpha_bound_ = 7.0;
  std::vector<Matrix> weights_;   // masked; weights_[0] is H1 x D
  Matrix cond_weights_;           // H1 x C
  std::vector<Matrix> biases_;    // H_l x 1
  Matrix mu_weights_;             // D x H_last
  Matrix mu_bias_;                // D x 1
  Matrix alpha_weights_;          // D x H_last
  Matrix alpha_bias_;             // D x 1
};

}  // namespace snl::flow
