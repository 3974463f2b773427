#pragma once

#include <cstdint>
#include <vector>

#include "snl/flow/maf.hpp"
#include "snl/flow/store.hpp"

namespace snl::flow {

// Batch-norm moments used when scoring the validation set each epoch.
enum class ValidationStats {
  // running averages maintained during training
  running,
  // moments of the full training split, recomputed before each validation pass
  training_set,
};

struct TrainConfig {
  int minibatch = 100;
  double learning_rate = 1e-4;
  double validation_fraction = 0.05;
  int patience = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  // 0 means train until early stopping triggers.
  int max_epochs = 0;
  // Reset batch-norm running moments to full-training-set statistics once the
  // best epoch has been restored.
  bool refit_batch_norm = true;
  ValidationStats validation_batch_norm = ValidationStats::training_set;

  void validate() const;
};

struct TrainResult {
  int epochs = 0;
  int best_epoch = 0;
  double best_validation_loss = 0.0;
  std::vector<double> train_losses;
  std::vector<double> validation_losses;
  std::size_t n_train = 0;
  std::size_t n_validation = 0;
};

class Adam {
 public:
  Adam(double learning_rate, double beta1, double beta2, double eps);
  void step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

// Maximizes the mean log density of the store's (theta, x) pairs with Adam on
// minibatches, holding out a random validation split and stopping once the
// validation loss has not improved for `patience` epochs. The flow is left at
// its best-validation parameters.
//
// Throws std::invalid_argument for fewer than two records, mismatched
// dimensions, or a store whose x is identical across all records.
TrainResult train(const SimulationStore& store, const TrainConfig& config, ConditionalMaf& flow);

}  // namespace snl::flow
