#pragma once

#include <functional>

#include "snl/flow/maf.hpp"
#include "snl/sim/simulator.hpp"

namespace snl::diagnostics {

// Draws n points at theta from a model of p(x | theta).
using ConditionalSampler = std::function<std::vector<DataVector>(const ParamVector& theta, int n, Rng& rng)>;

// MMD between n simulator draws at theta and n model draws at theta.
double sampler_gof(const ConditionalSampler& model, const sim::Simulator& simulator, const ParamVector& theta, int n,
                   std::uint64_t seed, int jobs = 1);

// sampler_gof with the flow as the model.
double likelihood_gof(const flow::ConditionalMaf& flow, const sim::Simulator& simulator, const ParamVector& theta,
                      int n, std::uint64_t seed, int jobs = 1);

// sampler_gof with a Gaussian fitted to a separate batch of n simulator draws.
double gaussian_gof(const sim::Simulator& simulator, const ParamVector& theta, int n, std::uint64_t seed,
                    int jobs = 1);

}  // namespace snl::diagnostics
