#include "snl/baselines/smc_abc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "snl/parallel.hpp"

namespace snl::baselines {

namespace {

enum Stream : std::uint64_t { kAttempt = 1, kResample };

constexpr int kMaxSupportTries = 1000;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Attempt {
  ParamVector theta;
  bool simulated = false;
  double distance = kInf;
};

std::size_t pick(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

// Perturbation kernel built from the previous population.
struct Kernel {
  const ParticlePopulation* from = nullptr;
  Matrix chol;
  Matrix chol_inv;
  std::vector<double> cumulative;
  std::vector<double> log_weights;
};

Kernel make_kernel(const ParticlePopulation& pop, double scale) {
  const Eigen::Index d = pop.particles.front().size();
  Vector mean = Vector::Zero(d);
  for (std::size_t i = 0; i < pop.particles.size(); ++i) mean += pop.weights[i] * pop.particles[i];
  Matrix cov = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < pop.particles.size(); ++i) {
    const Vector c = pop.particles[i] - mean;
    cov += pop.weights[i] * c * c.transpose();
  }
  cov *= scale;
  double jitter = 1e-10 * std::max(cov.diagonal().mean(), 1e-300);
  Eigen::LLT<Matrix> llt(cov);
  for (int k = 0; llt.info() != Eigen::Success && k < 10; ++k, jitter *= 100.0) {
    Matrix j = cov;
    j.diagonal().array() += jitter;
    llt.compute(j);
  }
  if (llt.info() != Eigen::Success) throw std::runtime_error("smc_abc: population covariance is degenerate");
  Kernel k;
  k.from = &pop;
  k.chol = llt.matrixL();
  k.chol_inv = k.chol.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  double acc = 0.0;
  for (double w : pop.weights) {
    acc += w;
    k.cumulative.push_back(acc);
    k.log_weights.push_back(w > 0.0 ? std::log(w) : kNegInf);
  }
  return k;
}

// log of sum_j w_j K(theta - theta_j), up to the shared Gaussian constant.
double log_mixture(const Kernel& k, const ParamVector& theta) {
  std::vector<double> terms(k.log_weights.size());
  double top = kNegInf;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    terms[j] = k.log_weights[j] - 0.5 * (k.chol_inv * (theta - k.from->particles[j])).squaredNorm();
    top = std::max(top, terms[j]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

}  // namespace

double effective_sample_size(const std::vector<double>& weights) {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

double ParticlePopulation::ess() const { return effective_sample_size(weights); }

void SmcAbcConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("SmcAbcConfig: particles must be >= 2");
  if (pilot_size < 1) throw std::invalid_argument("SmcAbcConfig: pilot_size must be >= 1");
  if (!(pilot_quantile > 0.0 && pilot_quantile <= 1.0))
    throw std::invalid_argument("SmcAbcConfig: pilot_quantile must be in (0, 1]");
  if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("SmcAbcConfig: decay must be in (0, 1)");
  if (!(resample_fraction >= 0.0 && resample_fraction <= 1.0))
    throw std::invalid_argument("SmcAbcConfig: resample_fraction must be in [0, 1]");
  if (std::isnan(initial_epsilon) || initial_epsilon < 0.0)
    throw std::invalid_argument("SmcAbcConfig: initial_epsilon must be >= 0");
  if (max_rounds < 0 || min_epsilon < 0.0 || jobs < 1 || !(kernel_scale > 0.0))
    throw std::invalid_argument("SmcAbcConfig: bad limits");
}

SmcAbcResult run_smc_abc(const sim::Prior& prior, const sim::Simulator& simulator, const DataVector& observed,
                         const SmcAbcConfig& config, const PopulationCallback& on_round) {
  config.validate();
  if (simulator.param_dim() != prior.dim())
    throw std::invalid_argument("run_smc_abc: simulator and prior dimensions differ");
  if (simulator.data_dim() != observed.size())
    throw std::invalid_argument("run_smc_abc: observed data has the wrong dimension");

  const auto m = static_cast<std::size_t>(config.particles);
  SmcAbcResult result;

  // Runs attempts [first, first + count) of a round. Attempt k draws its
  // proposal and its simulation from one substream.
  auto run_attempts = [&](int round, std::uint64_t first, std::size_t count, const Kernel* kernel) {
    std::vector<Attempt> out(count);
    parallel_for(count, config.jobs, [&](std::size_t i) {
      Rng rng(derive_seed(config.seed, kAttempt, static_cast<std::uint64_t>(round), first + i));
      Attempt& a = out[i];
      if (!kernel) {
        a.theta = prior.sample(rng);
      } else {
        bool inside = false;
        for (int t = 0; t < kMaxSupportTries && !inside; ++t) {
          const std::size_t j = pick(kernel->cumulative, uniform01(rng));
          a.theta = kernel->from->particles[j] + kernel->chol * standard_normal_vector(prior.dim(), rng);
          inside = prior.in_support(a.theta);
        }
        if (!inside) return;
      }
      a.simulated = true;
      const auto x = simulator.simulate(a.theta, rng);
      if (x && x->allFinite()) a.distance = (*x - observed).norm();
    });
    return out;
  };

  // Pilot: the first pilot_size prior attempts of round 1.
  std::vector<Attempt> pilot;
  if (config.initial_epsilon > 0.0) {
    result.initial_epsilon = config.initial_epsilon;
  } else {
    pilot = run_attempts(1, 0, static_cast<std::size_t>(config.pilot_size), nullptr);
    std::vector<double> distances;
    for (const auto& a : pilot) distances.push_back(a.distance);
    std::vector<double> sorted = distances;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(config.pilot_quantile * static_cast<double>(sorted.size())));
    result.initial_epsilon = sorted[std::max<std::size_t>(rank, 1) - 1];
    if (!std::isfinite(result.initial_epsilon))
      throw std::runtime_error("smc_abc: too many failed pilot simulations");
    result.pilot_acceptance = static_cast<double>(std::count_if(distances.begin(), distances.end(), [&](double d) {
                                return d <= result.initial_epsilon;
                              })) /
                              static_cast<double>(distances.size());
  }

  std::uint64_t total = 0;
  double epsilon = result.initial_epsilon;
  std::optional<ParticlePopulation> previous;
  for (int round = 1;; ++round) {
    ParticlePopulation pop;
    pop.round = round;
    pop.epsilon = epsilon;
    std::optional<Kernel> kernel;
    if (previous) kernel = make_kernel(*previous, config.kernel_scale);

    std::uint64_t attempts = 0, proposals = 0, accepted = 0;
    auto absorb = [&](const std::vector<Attempt>& batch) {
      for (const auto& a : batch) {
        ++proposals;
        if (a.simulated) ++attempts;
        if (pop.particles.size() < m && a.distance <= epsilon) {
          pop.particles.push_back(a.theta);
          ++accepted;
        }
      }
    };
    if (round == 1) absorb(pilot);
    while (pop.particles.size() < m) {
      if (attempts >= config.min_attempts_for_abort &&
          static_cast<double>(accepted) < config.min_acceptance * static_cast<double>(attempts)) {
        std::ostringstream msg;
        msg << "smc_abc: round " << round << " aborted, acceptance " << accepted << "/" << attempts
            << " is below " << config.min_acceptance << " at epsilon " << epsilon;
        result.simulator_calls = total + attempts;
        throw SmcAbcAborted(msg.str());
      }
      absorb(run_attempts(round, proposals, m - pop.particles.size(), kernel ? &*kernel : nullptr));
    }
    total += attempts;
    pop.round_simulations = attempts;
    pop.simulations = total;
    pop.acceptance_rate = attempts ? static_cast<double>(accepted) / static_cast<double>(attempts) : 0.0;

    if (!kernel) {
      pop.weights.assign(m, 1.0 / static_cast<double>(m));
    } else {
      std::vector<double> logw(m);
      double top = kNegInf;
      for (std::size_t i = 0; i < m; ++i) {
        logw[i] = prior.log_density(pop.particles[i]) - log_mixture(*kernel, pop.particles[i]);
        top = std::max(top, logw[i]);
      }
      pop.weights.resize(m);
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += pop.weights[i] = std::exp(logw[i] - top);
      for (double& w : pop.weights) w /= sum;
      if (pop.ess() < config.resample_fraction * static_cast<double>(m)) {
        Rng rng(derive_seed(config.seed, kResample, static_cast<std::uint64_t>(round)));
        std::vector<double> cumulative(m);
        std::partial_sum(pop.weights.begin(), pop.weights.end(), cumulative.begin());
        std::vector<ParamVector> drawn(m);
        for (auto& p : drawn) p = pop.particles[pick(cumulative, uniform01(rng))];
        pop.particles = std::move(drawn);
        pop.weights.assign(m, 1.0 / static_cast<double>(m));
        pop.resampled = true;
      }
    }

    result.simulator_calls = total;
    if (on_round) on_round(pop);
    result.populations.push_back(pop);
    previous = std::move(pop);

    const double next = epsilon * config.decay;
    if (config.max_rounds > 0 && round >= config.max_rounds) {
      result.stop_reason = "max_rounds";
      break;
    }
    if (config.simulation_budget > 0 && total >= config.simulation_budget) {
      result.stop_reason = "simulation_budget";
      break;
    }
    if (next < config.min_epsilon) {
      result.stop_reason = "min_epsilon";
      break;
    }
    epsilon = next;
  }
  return result;
}

}  // namespace snl::baselines
