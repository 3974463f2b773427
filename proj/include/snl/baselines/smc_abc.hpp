#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snl/sim/prior.hpp"
#include "snl/sim/simulator.hpp"

namespace snl::baselines {

struct ParticlePopulation {
  int round = 0;
  double epsilon = 0.0;
  std::vector<ParamVector> particles;
  // Normalized importance weights.
  std::vector<double> weights;
  // Simulator calls in this round and in all rounds so far (pilot included).
  std::uint64_t round_simulations = 0;
  std::uint64_t simulations = 0;
  double acceptance_rate = 0.0;
  bool resampled = false;

  double ess() const;
};

// 1 / sum(w^2) for weights that sum to one.
double effective_sample_size(const std::vector<double>& weights);

struct SmcAbcConfig {
  int particles = 1000;
  int pilot_size = 1000;
  // The first threshold is this quantile of the pilot distances.
  double pilot_quantile = 0.2;
  // A positive value (infinity allowed) replaces the pilot-based threshold
  // and skips the pilot.
  double initial_epsilon = 0.0;
  double decay = 0.9;
  // Resample when ESS drops below this fraction of the population.
  double resample_fraction = 0.5;
  // Stopping rule: whichever comes first. Zero disables a limit.
  int max_rounds = 20;
  std::uint64_t simulation_budget = 0;
  double min_epsilon = 0.0;
  // A round is abandoned once it has made at least min_attempts_for_abort
  // proposals with acceptance below this rate.
  double min_acceptance = 1e-3;
  std::uint64_t min_attempts_for_abort = 10000;
  // Multiplier on the weighted population covariance for the Gaussian kernel.
  double kernel_scale = 2.0;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

class SmcAbcAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SmcAbcResult {
  std::vector<ParticlePopulation> populations;
  double initial_epsilon = 0.0;
  // Fraction of pilot distances at or below the initial threshold; 0 when
  // the threshold was given.
  double pilot_acceptance = 0.0;
  std::uint64_t simulator_calls = 0;
  std::string stop_reason;
};

using PopulationCallback = std::function<void(const ParticlePopulation&)>;

// Population Monte Carlo ABC with Euclidean distance to the observation.
// Round 1 keeps drawing from the prior (the pilot draws count towards it);
// later rounds perturb weighted particles with a Gaussian kernel, accept when
// the distance is within epsilon and reweight by prior / kernel mixture.
// Throws SmcAbcAborted when a round's acceptance rate collapses; populations
// finished before that were already passed to `on_round`.
SmcAbcResult run_smc_abc(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed,
                         const SmcAbcConfig& config, const PopulationCallback& on_round = {});

}  // namespace snl::baselines
