#include "snl/baselines/synthetic_likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "snl/sim/batch.hpp"

namespace snl::baselines {

namespace {

enum Stream : std::uint64_t { kStart = 1, kChain, kEstimate };

}  // namespace

double synthetic_log_likelihood(const ParamVector& theta, const sim::Simulator& simulator, int n,
                                const DataVector& observed, std::uint64_t seed, int jobs) {
  const int d = simulator.data_dim();
  if (observed.size() != d) throw std::invalid_argument("synthetic_log_likelihood: observed has the wrong dimension");
  if (n < d + 2)
    throw std::invalid_argument("synthetic_log_likelihood: need at least " + std::to_string(d + 2) +
                                " simulations, got " + std::to_string(n));
  const std::vector<ParamVector> thetas(static_cast<std::size_t>(n), theta);
  const auto out = sim::simulate_batch(simulator, thetas, seed, 0, jobs);
  std::vector<Vector> xs;
  for (const auto& x : out)
    if (x) xs.push_back(*x);
  if (static_cast<int>(xs.size()) < d + 2) return kNegInf;

  const Matrix m = stack_columns(xs);
  const Vector mean = m.rowwise().mean();
  const Matrix centered = m.colwise() - mean;
  Matrix cov = centered * centered.transpose() / static_cast<double>(m.cols() - 1);
  cov.diagonal().array() += kCovarianceJitter * cov.diagonal().mean();
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success || !(cov.diagonal().array() > 0.0).all())
    throw std::runtime_error("synthetic_log_likelihood: simulated covariance is singular");
  const Vector r = llt.matrixL().solve(observed - mean);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(d) * kLog2Pi + logdet + r.squaredNorm());
}

double synthetic_log_likelihood(const ParamVector& theta, const sim::Simulator& simulator, int n,
                                const DataVector& observed, Rng& rng) {
  return synthetic_log_likelihood(theta, simulator, n, observed, rng(), 1);
}

void SlConfig::validate() const {
  if (sims_per_estimate < 1) throw std::invalid_argument("SlConfig: sims_per_estimate must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("SlConfig: n_samples must be >= 1");
  if (burn_in < 0 || thin < 1 || jobs < 1) throw std::invalid_argument("SlConfig: bad chain settings");
}

SlResult run_sl_mcmc(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed,
                     const SlConfig& config) {
  config.validate();
  if (simulator.param_dim() != prior.dim())
    throw std::invalid_argument("run_sl_mcmc: simulator and prior dimensions differ");
  if (config.sims_per_estimate < simulator.data_dim() + 2)
    throw std::invalid_argument("run_sl_mcmc: sims_per_estimate must be at least data dimension + 2");

  SlResult result;
  const mcmc::LogTarget target = [&](const ParamVector& theta) {
    const double lp = prior.log_density(theta);
    if (lp == kNegInf) return kNegInf;
    const std::uint64_t index = result.likelihood_estimates++;
    result.simulator_calls += static_cast<std::uint64_t>(config.sims_per_estimate);
    return lp + synthetic_log_likelihood(theta, simulator, config.sims_per_estimate, observed,
                                         derive_seed(config.seed, kEstimate, index), config.jobs);
  };
  Rng start(derive_seed(config.seed, kStart));
  result.chain = mcmc::ChainState(prior.sample(start), prior.upper() - prior.lower(), derive_seed(config.seed, kChain));
  mcmc::SliceOptions options;
  options.refresh_current = true;
  options.stay_when_exhausted = true;
  result.samples = mcmc::run_chain(result.chain, target, config.n_samples, config.burn_in, config.thin, options);
  return result;
}

}  // namespace snl::baselines
