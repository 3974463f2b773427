#pragma once

#include <functional>
#include <vector>

#include "snl/common.hpp"
#include "snl/sim/prior.hpp"
#include "snl/sim/simulator.hpp"

namespace snl::diagnostics {

struct RankRecord {
  int trial = 0;
  // Per parameter: number of posterior draws below the true value, in [0, L].
  std::vector<int> ranks;
};

// Maps (observed x, per-trial seed) to posterior draws.
using InferenceProcedure = std::function<std::vector<ParamVector>(const DataVector& x, std::uint64_t seed)>;

struct SbcResult {
  int n_samples = 0;  // L
  int dim = 0;
  std::vector<RankRecord> records;
  // Trials dropped because inference or simulation failed.
  int skipped = 0;
  // histograms[i][k]: trials where parameter i had rank k
  std::vector<std::vector<int>> histograms;
  // Pointwise 99% Binomial(trials, 1 / (L + 1)) envelope per bin.
  int band_lower = 0;
  int band_upper = 0;
  // Chi-square uniformity p-value per parameter.
  std::vector<double> p_values;
};

int rank_statistic(const std::vector<ParamVector>& draws, const ParamVector& truth, int axis);

// Pearson chi-square test of equal bin probabilities.
double chi_square_uniformity_p(const std::vector<int>& counts);

// Binomial quantiles bracketing the central `level` mass.
std::pair<int, int> binomial_band(int trials, double p, double level = 0.99);

// Fills histograms, band and p-values from the records.
void summarize(SbcResult& result);

// For each trial: theta ~ prior, x ~ simulator(theta), rank of every true
// theta_i among the L draws returned by `inference`. Trials are independent
// and run on up to `jobs` threads with per-trial seeds.
SbcResult sbc_ranks(const sim::Prior& prior, const sim::Simulator& simulator, const InferenceProcedure& inference,
                    int n_trials, int n_samples, std::uint64_t seed, int jobs = 1);

}  // namespace snl::diagnostics
