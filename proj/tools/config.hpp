#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace snl::cli {

// Bad configuration or usage; the command exits with status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One file = one run. Every field has a default; see README for the schema.
struct ExperimentConfig {
  std::string model = "toy";
  // Empty selects the model's default prior.
  std::string prior;
  // snl | nl | sl | smc_abc
  std::string method = "snl";
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;

  int rounds = 5;
  int sims_per_round = 1000;
  int nl_sims = 1000;
  int sl_sims_per_estimate = 100;
  int sl_samples = 1000;
  int smc_particles = 1000;
  int smc_max_rounds = 20;
  std::uint64_t smc_budget = 0;
  double smc_min_epsilon = 0.0;
  // Flow used by snl and nl; max_epochs 0 means early stopping only.
  int flow_layers = 5;
  int flow_hidden = 50;
  int flow_max_epochs = 0;
  double flow_learning_rate = 1e-4;
  // Prior-predictive pairs written by `simulate`.
  int simulate_n = 1000;

  // Posterior draws saved per run and used for the metrics.
  int posterior_samples = 1000;
  int burn_in = 200;
  // Compute accuracy metrics per round.
  bool evaluate = true;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::ordered_json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

const std::vector<std::string>& method_names();

}  // namespace snl::cli
