#include "snl/flow/maf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snl::flow {

void FlowConfig::validate() const {
  if (data_dim < 1) throw std::invalid_argument("FlowConfig: data_dim must be >= 1");
  if (cond_dim < 0) throw std::invalid_argument("FlowConfig: cond_dim must be >= 0");
  if (n_layers < 1) throw std::invalid_argument("FlowConfig: n_layers must be >= 1");
  if (hidden_sizes.empty()) throw std::invalid_argument("FlowConfig: hidden_sizes must be non-empty");
  for (int h : hidden_sizes)
    if (h < 1) throw std::invalid_argument("FlowConfig: hidden sizes must be >= 1");
}

Matrix broadcast_theta(const ParamVector& theta, Eigen::Index n) { return theta.replicate(1, n); }

ConditionalMaf::ConditionalMaf(FlowConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  cond_shift_ = Vector::Zero(config_.cond_dim);
  cond_scale_ = Vector::Ones(config_.cond_dim);
  Rng rng(seed);
  for (int k = 0; k < config_.n_layers; ++k) {
    const auto order = k % 2 == 0 ? natural_ordering(config_.data_dim) : reversed_ordering(config_.data_dim);
    MadeLayer layer(build_masks(config_.data_dim, config_.hidden_sizes, config_.cond_dim, order),
                    config_.alpha_bound);
    layer.initialize(rng);
    mades_.push_back(std::move(layer));
    if (config_.batch_norm && k + 1 < config_.n_layers)
      norms_.emplace_back(config_.data_dim, config_.bn_momentum, config_.bn_eps);
  }
}

void ConditionalMaf::set_conditioner_transform(const Vector& shift, const Vector& scale) {
  if (shift.size() != cond_dim() || scale.size() != cond_dim())
    throw std::invalid_argument("set_conditioner_transform: dimension mismatch");
  if (!shift.allFinite() || !scale.allFinite() || (scale.array() == 0.0).any())
    throw std::invalid_argument("set_conditioner_transform: need finite shift and finite non-zero scale");
  cond_shift_ = shift;
  cond_scale_ = scale;
  cond_identity_ = (shift.array() == 0.0).all() && (scale.array() == 1.0).all();
}

Matrix ConditionalMaf::conditioner(const Matrix& theta) const {
  if (cond_identity_) return theta;
  return (theta.colwise() - cond_shift_).array().colwise() * cond_scale_.array();
}

Vector ConditionalMaf::log_prob(const Matrix& x, const Matrix& theta_in, Mode mode) const {
  if (x.rows() != data_dim() || theta_in.rows() != cond_dim() || x.cols() != theta_in.cols())
    throw std::invalid_argument("ConditionalMaf::log_prob: dimension mismatch");
  const Matrix theta = conditioner(theta_in);
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(x.cols());
  Eigen::RowVectorXd ld;
  Matrix z = x;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    z = mades_[k].forward(z, theta, ld);
    total += ld;
    if (k < norms_.size()) {
      z = norms_[k].forward(z, mode, ld);
      total += ld;
    }
  }
  const double norm = 0.5 * data_dim() * kLog2Pi;
  Vector out = (total.array() - 0.5 * z.colwise().squaredNorm().array() - norm).transpose();
  return out;
}

double ConditionalMaf::log_prob(const DataVector& x, const ParamVector& theta) const {
  return log_prob(Matrix(x), Matrix(theta), Mode::eval)(0);
}

Vector ConditionalMaf::log_prob_batch(const Matrix& x, const ParamVector& theta) const {
  return log_prob(x, broadcast_theta(theta, x.cols()), Mode::eval);
}

Matrix ConditionalMaf::to_base(const Matrix& x, const Matrix& theta_in, Eigen::RowVectorXd* logdet) const {
  if (x.rows() != data_dim() || theta_in.rows() != cond_dim() || x.cols() != theta_in.cols())
    throw std::invalid_argument("ConditionalMaf::to_base: dimension mismatch");
  const Matrix theta = conditioner(theta_in);
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(x.cols());
  Eigen::RowVectorXd ld;
  Matrix z = x;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    z = mades_[k].forward(z, theta, ld);
    total += ld;
    if (k < norms_.size()) {
      z = norms_[k].forward(z, Mode::eval, ld);
      total += ld;
    }
  }
  if (logdet) *logdet = total;
  return z;
}

Matrix ConditionalMaf::from_base(const Matrix& u, const Matrix& theta_in) const {
  if (u.rows() != data_dim() || theta_in.rows() != cond_dim() || u.cols() != theta_in.cols())
    throw std::invalid_argument("ConditionalMaf::from_base: dimension mismatch");
  const Matrix theta = conditioner(theta_in);
  Matrix z = u;
  for (std::size_t k = mades_.size(); k-- > 0;) {
    if (k < norms_.size()) z = norms_[k].inverse(z);
    z = mades_[k].inverse(z, theta);
    if (!z.allFinite())
      throw std::runtime_error("ConditionalMaf::from_base: non-finite value after inverting layer " +
                               std::to_string(k));
  }
  return z;
}

DataVector ConditionalMaf::sample(const ParamVector& theta, Rng& rng) const {
  return sample(theta, 1, rng).col(0);
}

Matrix ConditionalMaf::sample(const ParamVector& theta, int n, Rng& rng) const {
  if (theta.size() != cond_dim()) throw std::invalid_argument("ConditionalMaf::sample: dimension mismatch");
  Matrix u(data_dim(), n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < data_dim(); ++i) u(i, j) = standard_normal(rng);
  return from_base(u, broadcast_theta(theta, n));
}

double ConditionalMaf::loss_and_gradient(const Matrix& x, const Matrix& theta_in, Mode mode,
                                         std::vector<Matrix>& grads, bool absorb_stats) {
  if (x.rows() != data_dim() || theta_in.rows() != cond_dim() || x.cols() != theta_in.cols())
    throw std::invalid_argument("ConditionalMaf::loss_and_gradient: dimension mismatch");
  const Matrix theta = conditioner(theta_in);
  const auto params = parameters();
  grads.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) grads[i].setZero(params[i]->rows(), params[i]->cols());

  const Eigen::Index batch = x.cols();
  std::vector<MadeLayer::Cache> made_caches(mades_.size());
  std::vector<BatchNormLayer::Cache> norm_caches(norms_.size());
  Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(batch);
  Eigen::RowVectorXd ld;
  Matrix z = x;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    z = mades_[k].forward(z, theta, ld, &made_caches[k]);
    total += ld;
    if (k < norms_.size()) {
      z = norms_[k].forward(z, mode, ld, &norm_caches[k]);
      total += ld;
    }
  }
  const double n = static_cast<double>(batch);
  const double loss =
      -(total.sum() - 0.5 * z.squaredNorm()) / n + 0.5 * data_dim() * kLog2Pi;

  // Slot offsets per layer, in parameters() order.
  std::vector<std::size_t> made_offset(mades_.size()), norm_offset(norms_.size());
  std::size_t offset = 0;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    made_offset[k] = offset;
    offset += 2 * mades_[k].masks().hidden_masks.size() + 5;
    if (k < norms_.size()) {
      norm_offset[k] = offset;
      offset += 2;
    }
  }

  const Eigen::RowVectorXd grad_ld = Eigen::RowVectorXd::Constant(batch, -1.0 / n);
  Matrix grad_z = z / n;
  std::span<Matrix> all(grads);
  for (std::size_t k = mades_.size(); k-- > 0;) {
    grad_z = mades_[k].backward(made_caches[k], grad_z, grad_ld,
                                all.subspan(made_offset[k], 2 * mades_[k].masks().hidden_masks.size() + 5));
    if (k > 0 && k - 1 < norms_.size())
      grad_z = norms_[k - 1].backward(norm_caches[k - 1], grad_z, grad_ld, all.subspan(norm_offset[k - 1], 2));
  }

  if (absorb_stats && mode == Mode::train)
    for (std::size_t k = 0; k < norms_.size(); ++k) norms_[k].absorb(norm_caches[k]);
  return loss;
}

std::vector<Matrix*> ConditionalMaf::parameters() {
  std::vector<Matrix*> out;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    for (Matrix* p : mades_[k].parameters()) out.push_back(p);
    if (k < norms_.size())
      for (Matrix* p : norms_[k].parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const Matrix*> ConditionalMaf::parameters() const {
  std::vector<const Matrix*> out;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    for (const Matrix* p : mades_[k].parameters()) out.push_back(p);
    if (k < norms_.size())
      for (const Matrix* p : norms_[k].parameters()) out.push_back(p);
  }
  return out;
}

std::vector<const Matrix*> ConditionalMaf::gradient_masks() const {
  std::vector<const Matrix*> out;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    for (const Matrix* m : mades_[k].gradient_masks()) out.push_back(m);
    if (k < norms_.size()) {
      out.push_back(nullptr);
      out.push_back(nullptr);
    }
  }
  return out;
}

std::size_t ConditionalMaf::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix* p : parameters()) n += static_cast<std::size_t>(p->size());
  return n;
}

void ConditionalMaf::recompute_batch_norm_stats(const Matrix& x, const Matrix& theta_in) {
  if (x.cols() < 2) throw std::invalid_argument("recompute_batch_norm_stats: need at least two points");
  const Matrix theta = conditioner(theta_in);
  Eigen::RowVectorXd ld;
  Matrix z = x;
  for (std::size_t k = 0; k < mades_.size(); ++k) {
    z = mades_[k].forward(z, theta, ld);
    if (k < norms_.size()) {
      const Vector mean = z.rowwise().mean();
      Vector var = (z.colwise() - mean).array().square().rowwise().mean();
      var = var.cwiseMax(1e-300);
      norms_[k].set_running(mean, var);
      z = norms_[k].forward(z, Mode::eval, ld);
    }
  }
}

}  // namespace snl::flow
