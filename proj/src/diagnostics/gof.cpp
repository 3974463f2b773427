#include "snl/diagnostics/gof.hpp"

#include <stdexcept>

#include "snl/diagnostics/metrics.hpp"
#include "snl/sim/batch.hpp"

namespace snl::diagnostics {

namespace {

enum Stream : std::uint64_t { kReference = 1, kModel, kFit };

std::vector<DataVector> simulate_at(const sim::Simulator& simulator, const ParamVector& theta, int n,
                                    std::uint64_t seed, int jobs) {
  const std::vector<ParamVector> thetas(static_cast<std::size_t>(n), theta);
  const auto out = sim::simulate_batch(simulator, thetas, seed, 0, jobs);
  std::vector<DataVector> xs;
  xs.reserve(out.size());
  for (const auto& x : out) {
    if (!x) throw std::runtime_error("gof: simulator failed at the evaluation parameters");
    xs.push_back(*x);
  }
  return xs;
}

}  // namespace

double sampler_gof(const ConditionalSampler& model, const sim::Simulator& simulator, const ParamVector& theta, int n,
                   std::uint64_t seed, int jobs) {
  if (n < 2) throw std::invalid_argument("gof: n must be >= 2");
  const auto reference = simulate_at(simulator, theta, n, derive_seed(seed, kReference), jobs);
  Rng rng(derive_seed(seed, kModel));
  const auto drawn = model(theta, n, rng);
  return mmd(reference, drawn);
}

double likelihood_gof(const flow::ConditionalMaf& flow, const sim::Simulator& simulator, const ParamVector& theta,
                      int n, std::uint64_t seed, int jobs) {
  const ConditionalSampler sampler = [&flow](const ParamVector& t, int count, Rng& rng) {
    return unstack_columns(flow.sample(t, count, rng));
  };
  return sampler_gof(sampler, simulator, theta, n, seed, jobs);
}

double gaussian_gof(const sim::Simulator& simulator, const ParamVector& theta, int n, std::uint64_t seed, int jobs) {
  const ConditionalSampler sampler = [&](const ParamVector& t, int count, Rng& rng) {
    const Matrix fit = stack_columns(simulate_at(simulator, t, n, derive_seed(seed, kFit), jobs));
    const Vector mean = fit.rowwise().mean();
    const Matrix centered = fit.colwise() - mean;
    Matrix cov = centered * centered.transpose() / static_cast<double>(fit.cols() - 1);
    cov.diagonal().array() += 1e-8 * std::max(cov.diagonal().mean(), 1e-300);
    const Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("gaussian_gof: covariance is not positive definite");
    const Matrix l = llt.matrixL();
    std::vector<DataVector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(mean + l * standard_normal_vector(mean.size(), rng));
    return out;
  };
  return sampler_gof(sampler, simulator, theta, n, seed, jobs);
}

}  // namespace snl::diagnostics
