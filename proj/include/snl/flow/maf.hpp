#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snl/common.hpp"
#include "snl/flow/batch_norm.hpp"
#include "snl/flow/made.hpp"

namespace snl::flow {

struct FlowConfig {
  int data_dim = 1;
  int cond_dim = 0;
  int n_layers = 5;
  std::vector<int> hidden_sizes{50, 50};
  bool batch_norm = true;
  double bn_momentum = 0.9;
  double bn_eps = 1e-5;
  double alpha_bound = 7.0;

  void validate() const;
};

// Conditional masked autoregressive flow q(x | theta).
//
// Density direction applies MADE layer 0, batch norm 0, MADE layer 1, ...,
// MADE layer K-1 and evaluates the standard normal at the result. Even layers
// use the natural coordinate ordering, odd layers the reversed one.
class ConditionalMaf {
 public:
  ConditionalMaf() = default;
  // Builds the layers and initializes them from `seed`; heads start at zero so
  // the flow is the identity map.
  ConditionalMaf(FlowConfig config, std::uint64_t seed);

  const FlowConfig& config() const { return config_; }
  int data_dim() const { return config_.data_dim; }
  int cond_dim() const { return config_.cond_dim; }

  const std::vector<MadeLayer>& made_layers() const { return mades_; }
  std::vector<MadeLayer>& made_layers() { return mades_; }
  const std::vector<BatchNormLayer>& batch_norms() const { return norms_; }
  std::vector<BatchNormLayer>& batch_norms() { return norms_; }

  // Eval-mode log density of a single point.
  double log_prob(const DataVector& x, const ParamVector& theta) const;
  // Per-column log densities. Train mode normalizes with batch moments.
  Vector log_prob(const Matrix& x, const Matrix& theta, Mode mode = Mode::eval) const;
  // Per-column log densities, all under the same theta.
  Vector log_prob_batch(const Matrix& x, const ParamVector& theta) const;

  // Eval-mode map from data to base variables, with the total log|det|.
  Matrix to_base(const Matrix& x, const Matrix& theta, Eigen::RowVectorXd* logdet = nullptr) const;
  // Inverse of to_base. Throws std::runtime_error on non-finite intermediates.
  Matrix from_base(const Matrix& u, const Matrix& theta) const;

  DataVector sample(const ParamVector& theta, Rng& rng) const;
  // n samples at one theta, returned as columns.
  Matrix sample(const ParamVector& theta, int n, Rng& rng) const;

  // Mean negative log likelihood over the batch and its gradient. `grads` is
  // resized to match parameters(). When `absorb_stats` is set and mode is
  // train, running batch-norm moments are updated from this batch.
  double loss_and_gradient(const Matrix& x, const Matrix& theta, Mode mode, std::vector<Matrix>& grads,
                           bool absorb_stats = false);

  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  std::vector<const Matrix*> gradient_masks() const;
  std::size_t parameter_count() const;

  // Fixed affine map applied to theta before it reaches the layers:
  // theta' = (theta - shift) * scale, elementwise. Identity by default.
  void set_conditioner_transform(const Vector& shift, const Vector& scale);
  const Vector& conditioner_shift() const { return cond_shift_; }
  const Vector& conditioner_scale() const { return cond_scale_; }

  // Sets every batch-norm running moment to the statistics of `x` propagated
  // through the preceding eval-mode layers.
  void recompute_batch_norm_stats(const Matrix& x, const Matrix& theta);

 private:
  FlowConfig config_;
  std::vector<MadeLayer> mades_;
  std::vector<BatchNormLayer> norms_;
  Vector cond_shift_;
  Vector cond_scale_;
  bool cond_identity_ = true;

  Matrix conditioner(const Matrix& theta) const;
};

Matrix broadcast_theta(const ParamVector& theta, Eigen::Index n);

}  // namespace snl::flow
