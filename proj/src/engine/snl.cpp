#include "snl/engine/snl.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

#include "snl/diagnostics/metrics.hpp"
#include "snl/sim/batch.hpp"

namespace snl::engine {

namespace {

enum Stream : std::uint64_t { kFlowInit = 1, kTraining, kPriorDraws, kChain, kChainStart, kSimulation };

Vector prior_widths(const sim::Prior& prior) { return prior.upper() - prior.lower(); }

}  // namespace

void SnlConfig::validate() const {
  if (rounds < 1) throw std::invalid_argument("SnlConfig: rounds must be >= 1");
  if (sims_per_round < 2) throw std::invalid_argument("SnlConfig: sims_per_round must be >= 2");
  if (burn_in < 0) throw std::invalid_argument("SnlConfig: burn_in must be >= 0");
  if (thin < 1) throw std::invalid_argument("SnlConfig: thin must be >= 1");
  if (max_retries < 0) throw std::invalid_argument("SnlConfig: max_retries must be >= 0");
  if (jobs < 1) throw std::invalid_argument("SnlConfig: jobs must be >= 1");
  train.validate();
}

PosteriorApprox::PosteriorApprox(std::shared_ptr<const flow::ConditionalMaf> flow, sim::Prior prior,
                                 DataVector observed)
    : flow_(std::move(flow)), prior_(std::move(prior)), observed_(std::move(observed)) {
  if (!flow_) throw std::invalid_argument("PosteriorApprox: null flow");
  if (flow_->cond_dim() != prior_.dim() || flow_->data_dim() != observed_.size())
    throw std::invalid_argument("PosteriorApprox: dimension mismatch");
}

double PosteriorApprox::log_density(const ParamVector& theta) const {
  const double lp = prior_.log_density(theta);
  if (lp == kNegInf) return kNegInf;
  return flow_->log_prob(observed_, theta) + lp;
}

mcmc::LogTarget PosteriorApprox::target() const {
  return [this](const ParamVector& theta) { return log_density(theta); };
}

std::vector<ParamVector> PosteriorApprox::sample(int n, std::uint64_t seed, int burn_in, int thin) const {
  Rng start_rng(derive_seed(seed, kChainStart));
  mcmc::ChainState chain(prior_.sample(start_rng), prior_widths(prior_), derive_seed(seed, kChain));
  return mcmc::run_chain(chain, target(), n, burn_in, thin);
}

SnlResult run_snl(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed,
                  const SnlConfig& config, const RoundCallback& on_round) {
  config.validate();
  if (simulator.param_dim() != prior.dim())
    throw std::invalid_argument("run_snl: simulator and prior dimensions differ");
  if (simulator.data_dim() != observed.size())
    throw std::invalid_argument("run_snl: observed data has the wrong dimension");

  flow::FlowConfig fc = config.flow;
  fc.data_dim = simulator.data_dim();
  fc.cond_dim = prior.dim();
  auto flow = std::make_shared<flow::ConditionalMaf>(fc, derive_seed(config.seed, kFlowInit));
  // Map the prior box onto [-1, 1] before it reaches the conditioner inputs.
  flow->set_conditioner_transform(0.5 * (prior.lower() + prior.upper()),
                                  (2.0 / (prior.upper() - prior.lower()).array()).matrix());

  Rng prior_rng(derive_seed(config.seed, kPriorDraws));
  Rng start_rng(derive_seed(config.seed, kChainStart));
  mcmc::ChainState chain(prior.sample(start_rng), prior_widths(prior), derive_seed(config.seed, kChain));

  SnlResult result{PosteriorApprox(flow, prior, observed), {}, {}, 0, {}};
  const auto n = static_cast<std::size_t>(config.sims_per_round);

  for (int round = 1; round <= config.rounds; ++round) {
    const auto started = std::chrono::steady_clock::now();
    RoundReport report;
    report.round = round;
    report.chain_start = chain.current;

    // Proposal source for this round; also used for replacement draws.
    std::function<ParamVector()> propose;
    const PosteriorApprox previous(flow, prior, observed);
    const mcmc::LogTarget target = previous.target();
    if (round == 1) {
      propose = [&] { return prior.sample(prior_rng); };
    } else {
      chain.current_log_target = std::numeric_limits<double>::quiet_NaN();
      for (int i = 0; i < config.burn_in; ++i) mcmc::sweep(chain, target);
      propose = [&] {
        for (int t = 0; t < config.thin; ++t) mcmc::sweep(chain, target);
        return ParamVector(chain.current);
      };
    }

    std::vector<ParamVector> thetas(n);
    for (auto& t : thetas) t = propose();
    std::vector<std::optional<DataVector>> xs(n);
    std::vector<std::size_t> pending(n);
    for (std::size_t i = 0; i < n; ++i) pending[i] = i;
    std::uint64_t call_index = 0;
    for (int attempt = 0; !pending.empty(); ++attempt) {
      if (attempt > config.max_retries)
        throw std::runtime_error("run_snl: simulations kept failing in round " + std::to_string(round) + " after " +
                                 std::to_string(config.max_retries) + " replacement draws");
      if (attempt > 0)
        for (std::size_t i : pending) thetas[i] = propose();
      std::vector<ParamVector> batch;
      batch.reserve(pending.size());
      for (std::size_t i : pending) batch.push_back(thetas[i]);
      const auto out = sim::simulate_batch(simulator, batch, derive_seed(config.seed, kSimulation, round),
                                           call_index, config.jobs);
      call_index += batch.size();
      std::vector<std::size_t> still;
      for (std::size_t k = 0; k < pending.size(); ++k) {
        if (out[k])
          xs[pending[k]] = out[k];
        else
          still.push_back(pending[k]);
      }
      report.failed_simulations += still.size();
      pending = std::move(still);
    }
    result.simulator_calls += call_index;
    report.chain_end = chain.current;

    std::vector<DataVector> round_xs;
    round_xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      result.store.add(round, thetas[i], *xs[i]);
      round_xs.push_back(*xs[i]);
    }
    report.proposals = thetas;
    report.median_distance = diagnostics::median_distance(round_xs, observed);

    flow::TrainConfig tc = config.train;
    tc.seed = derive_seed(config.seed, kTraining, round);
    const flow::TrainResult tr = flow::train(result.store, tc, *flow);
    report.validation_loss = tr.best_validation_loss;
    report.epochs = tr.epochs;

    report.simulations = result.store.size();
    report.simulator_calls = result.simulator_calls;
    report.flow = std::make_shared<flow::ConditionalMaf>(*flow);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (on_round) on_round(report);
    result.rounds.push_back(std::move(report));
  }

  result.posterior = PosteriorApprox(result.rounds.back().flow, prior, observed);
  result.chain = chain;
  return result;
}

SnlResult run_nl(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed, int n,
                 SnlConfig config, const RoundCallback& on_round) {
  config.rounds = 1;
  config.sims_per_round = n;
  return run_snl(prior, simulator, observed, config, on_round);
}

}  // namespace snl::engine
