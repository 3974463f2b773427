#include "snl/flow/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace snl::flow {

void TrainConfig::validate() const {
  if (minibatch < 1) throw std::invalid_argument("TrainConfig: minibatch must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning rate must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw std::invalid_argument("TrainConfig: validation fraction must be in (0, 1)");
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (max_epochs < 0) throw std::invalid_argument("TrainConfig: max_epochs must be >= 0");
}

Adam::Adam(double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads) {
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i].cwiseAbs2();
    params[i]->array() -= step * m_[i].array() / (v_[i].array().sqrt() + eps_ * std::sqrt(c2));
  }
}

namespace {

Matrix gather(const Matrix& src, const std::vector<Eigen::Index>& idx, std::size_t begin, std::size_t end) {
  Matrix out(src.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t j = begin; j < end; ++j) out.col(static_cast<Eigen::Index>(j - begin)) = src.col(idx[j]);
  return out;
}

std::vector<Matrix> snapshot(const ConditionalMaf& flow) {
  std::vector<Matrix> out;
  for (const Matrix* p : flow.parameters()) out.push_back(*p);
  for (const auto& bn : flow.batch_norms()) {
    out.push_back(bn.running_mean());
    out.push_back(bn.running_var());
  }
  return out;
}

void restore(ConditionalMaf& flow, const std::vector<Matrix>& saved) {
  auto params = flow.parameters();
  std::size_t i = 0;
  for (; i < params.size(); ++i) *params[i] = saved[i];
  for (auto& bn : flow.batch_norms()) {
    bn.set_running(saved[i], saved[i + 1]);
    i += 2;
  }
}

template <class F>
void shuffle(std::vector<Eigen::Index>& v, Rng& rng, F&& below) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(rng, i)]);
}

std::size_t uniform_below(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

}  // namespace

TrainResult train(const SimulationStore& store, const TrainConfig& config, ConditionalMaf& flow) {
  config.validate();
  if (store.size() < 2) throw std::invalid_argument("train: store needs at least two records");
  if (store.param_dim() != flow.cond_dim() || store.data_dim() != flow.data_dim())
    throw std::invalid_argument("train: store dimensions do not match the flow");

  const Matrix xs = store.xs();
  const Matrix thetas = store.thetas();
  if (((xs.colwise() - xs.col(0)).array() == 0.0).all())
    throw std::invalid_argument("train: degenerate store, x is constant across all records");

  Rng rng(config.seed);
  const auto n = static_cast<std::size_t>(xs.cols());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  shuffle(order, rng, uniform_below);

  std::size_t n_val = static_cast<std::size_t>(std::lround(config.validation_fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  const std::size_t n_train = n - n_val;

  const Matrix x_val = gather(xs, order, 0, n_val);
  const Matrix t_val = gather(thetas, order, 0, n_val);
  std::vector<Eigen::Index> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  const Matrix x_train = gather(xs, train_idx, 0, train_idx.size());
  const Matrix t_train = gather(thetas, train_idx, 0, train_idx.size());

  TrainResult result;
  result.n_train = n_train;
  result.n_validation = n_val;
  result.best_validation_loss = std::numeric_limits<double>::infinity();

  const bool use_batch_stats = !flow.batch_norms().empty();
  const std::size_t batch = static_cast<std::size_t>(config.minibatch);
  Adam adam(config.learning_rate, config.beta1, config.beta2, config.adam_eps);
  std::vector<Matrix> grads;
  std::vector<Matrix> best = snapshot(flow);

  for (int epoch = 1;; ++epoch) {
    shuffle(train_idx, rng, uniform_below);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n_train;) {
      std::size_t end = std::min(begin + batch, n_train);
      // A trailing batch of one cannot be batch-normalized; fold it into this one.
      if (n_train - end == 1) end = n_train;
      const Matrix xb = gather(xs, train_idx, begin, end);
      const Matrix tb = gather(thetas, train_idx, begin, end);
      const Mode mode = use_batch_stats && xb.cols() >= 2 ? Mode::train : Mode::eval;
      const double loss = flow.loss_and_gradient(xb, tb, mode, grads, true);
      if (!std::isfinite(loss)) throw std::runtime_error("train: non-finite training loss");
      const auto params = flow.parameters();
      const auto masks = flow.gradient_masks();
      for (std::size_t i = 0; i < grads.size(); ++i)
        if (masks[i]) grads[i].array() *= masks[i]->array();
      adam.step(params, grads);
      epoch_loss += loss * static_cast<double>(end - begin);
      begin = end;
    }
    result.train_losses.push_back(epoch_loss / static_cast<double>(n_train));

    if (config.validation_batch_norm == ValidationStats::training_set && use_batch_stats)
      flow.recompute_batch_norm_stats(x_train, t_train);
    const double val_loss = -flow.log_prob(x_val, t_val, Mode::eval).mean();
    result.validation_losses.push_back(val_loss);
    result.epochs = epoch;
    if (val_loss < result.best_validation_loss) {
      result.best_validation_loss = val_loss;
      result.best_epoch = epoch;
      best = snapshot(flow);
    } else if (epoch - result.best_epoch >= config.patience) {
      break;
    }
    if (config.max_epochs > 0 && epoch >= config.max_epochs) break;
  }

  restore(flow, best);
  if (config.refit_batch_norm && use_batch_stats)
    flow.recompute_batch_norm_stats(x_train, t_train);
  return result;
}

}  // namespace snl::flow
