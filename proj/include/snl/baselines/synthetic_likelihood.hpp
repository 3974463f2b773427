#pragma once

#include <cstdint>
#include <vector>

#include "snl/mcmc/slice_sampler.hpp"
#include "snl/sim/prior.hpp"
#include "snl/sim/simulator.hpp"

namespace snl::baselines {

// log N(x_o | m, S) where m and S are the sample mean and unbiased covariance
// of n fresh simulations at theta. Simulation i uses derive_seed(seed, i).
// Failed simulations are dropped; if fewer than d + 2 remain the result is
// -infinity. Throws std::invalid_argument for n < d + 2 and
// std::runtime_error when S stays singular after jitter.
double synthetic_log_likelihood(const ParamVector& theta, const sim::Simulator& simulator, int n,
                                const DataVector& observed, std::uint64_t seed, int jobs = 1);
double synthetic_log_likelihood(const ParamVector& theta, const sim::Simulator& simulator, int n,
                                const DataVector& observed, Rng& rng);

inline constexpr double kCovarianceJitter = 1e-8;

struct SlConfig {
  // Simulations per likelihood estimate.
  int sims_per_estimate = 100;
  int n_samples = 1000;
  int burn_in = 200;
  int thin = 1;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

struct SlResult {
  std::vector<ParamVector> samples;
  // Estimates actually computed (points outside the prior need none).
  std::uint64_t likelihood_estimates = 0;
  std::uint64_t simulator_calls = 0;
  mcmc::ChainState chain;
};

// Slice sampling on log p(theta) + synthetic log-likelihood, started from a
// prior draw. Each target evaluation runs a new batch of simulations,
// including a fresh estimate at the current point before every axis update;
// an update whose shrinkage runs out leaves the point in place
// (chain.stalled_updates).
SlResult run_sl_mcmc(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed,
                     const SlConfig& config);

}  // namespace snl::baselines
