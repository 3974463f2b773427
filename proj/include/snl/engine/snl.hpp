#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "snl/flow/maf.hpp"
#include "snl/flow/store.hpp"
#include "snl/flow/train.hpp"
#include "snl/mcmc/slice_sampler.hpp"
#include "snl/sim/prior.hpp"
#include "snl/sim/simulator.hpp"

namespace snl::engine {

struct SnlConfig {
  int rounds = 5;
  int sims_per_round = 1000;
  // Sweeps of the proposal chain at the start of every round after the first.
  int burn_in = 200;
  int thin = 1;
  // Replacement draws allowed per proposal slot when a simulation fails.
  int max_retries = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  // data_dim and cond_dim are filled in from the simulator.
  flow::FlowConfig flow;
  flow::TrainConfig train;

  void validate() const;
};

// log q(x_o | theta) + log p(theta), unnormalized.
class PosteriorApprox {
 public:
  PosteriorApprox(std::shared_ptr<const flow::ConditionalMaf> flow, sim::Prior prior, DataVector observed);

  double log_density(const ParamVector& theta) const;
  mcmc::LogTarget target() const;

  // Draws from a fresh chain started at a prior sample.
  std::vector<ParamVector> sample(int n, std::uint64_t seed, int burn_in = 200, int thin = 1) const;

  const flow::ConditionalMaf& flow() const { return *flow_; }
  std::shared_ptr<const flow::ConditionalMaf> flow_ptr() const { return flow_; }
  const sim::Prior& prior() const { return prior_; }
  const DataVector& observed() const { return observed_; }

 private:
  std::shared_ptr<const flow::ConditionalMaf> flow_;
  sim::Prior prior_;
  DataVector observed_;
};

struct RoundReport {
  int round = 0;
  // Cumulative count of stored simulations, round * N.
  std::uint64_t simulations = 0;
  // Simulator calls so far, failed ones included.
  std::uint64_t simulator_calls = 0;
  std::uint64_t failed_simulations = 0;
  double median_distance = 0.0;
  double validation_loss = 0.0;
  double seconds = 0.0;
  int epochs = 0;
  // Proposal chain state when the round began and after its last proposal.
  ParamVector chain_start;
  ParamVector chain_end;
  std::shared_ptr<const flow::ConditionalMaf> flow;
  std::vector<ParamVector> proposals;
};

struct SnlResult {
  PosteriorApprox posterior;
  std::vector<RoundReport> rounds;
  flow::SimulationStore store;
  std::uint64_t simulator_calls = 0;
  mcmc::ChainState chain;
};

using RoundCallback = std::function<void(const RoundReport&)>;

// Sequential neural likelihood. Round 1 proposes from the prior; every later
// round runs the persistent slice-sampling chain on the previous round's
// posterior. Each round's N simulations join the store and the flow is
// trained further on everything simulated so far.
SnlResult run_snl(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed,
                  const SnlConfig& config, const RoundCallback& on_round = {});

// One round with N prior simulations.
SnlResult run_nl(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed, int n,
                 SnlConfig config, const RoundCallback& on_round = {});

}  // namespace snl::engine
