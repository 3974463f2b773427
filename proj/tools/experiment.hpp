#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "snl/sim/registry.hpp"

namespace snl::cli {

struct RunOutcome {
  bool ok = true;
  std::string error;
  // Instrumented count and the count the method itself reported.
  std::uint64_t simulator_calls = 0;
  std::uint64_t reported_simulations = 0;
};

// Runs one experiment and writes manifest.json, metrics.csv,
// posterior_samples.csv and the method's own artifacts into `out`. A failure
// mid-run leaves the artifacts written so far plus error.json, and the
// manifest is marked "failed".
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

// Writes config.simulate_n prior-predictive pairs (store.jsonl), the
// observation (observed.json) and a manifest.
RunOutcome simulate_prior_predictive(const ExperimentConfig& config, const std::filesystem::path& out);

// Posterior draws for data x by the configured method, `thin` sweeps (or
// resampling for SMC-ABC) between draws. Used for calibration checks.
std::vector<ParamVector> infer(const ExperimentConfig& config, const sim::Model& model, const sim::Simulator& simulator,
                               const DataVector& x, int n, int thin, std::uint64_t seed);

// Slice-sampling draws from the exact toy posterior.
std::vector<ParamVector> toy_reference_posterior(const sim::Model& model, int n, std::uint64_t seed);

nlohmann::ordered_json build_info();

}  // namespace snl::cli
