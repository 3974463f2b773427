#include "snl/diagnostics/sbc.hpp"

#include <optional>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "snl/parallel.hpp"

namespace snl::diagnostics {

int rank_statistic(const std::vector<ParamVector>& draws, const ParamVector& truth, int axis) {
  int rank = 0;
  for (const auto& d : draws) rank += d(axis) < truth(axis) ? 1 : 0;
  return rank;
}

double chi_square_uniformity_p(const std::vector<int>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi_square_uniformity_p: need at least two bins");
  double total = 0.0;
  for (int c : counts) total += c;
  if (total <= 0.0) throw std::invalid_argument("chi_square_uniformity_p: no observations");
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

std::pair<int, int> binomial_band(int trials, double p, double level) {
  if (trials < 1 || !(p > 0.0 && p < 1.0) || !(level > 0.0 && level < 1.0))
    throw std::invalid_argument("binomial_band: bad arguments");
  const boost::math::binomial dist(trials, p);
  const double tail = 0.5 * (1.0 - level);
  // Smallest k whose CDF reaches the requested level.
  auto quantile = [&](double q) {
    int k = 0;
    while (k < trials && boost::math::cdf(dist, k) < q) ++k;
    return k;
  };
  return {quantile(tail), quantile(1.0 - tail)};
}

void summarize(SbcResult& result) {
  result.histograms.assign(static_cast<std::size_t>(result.dim),
                           std::vector<int>(static_cast<std::size_t>(result.n_samples + 1), 0));
  for (const auto& r : result.records)
    for (int i = 0; i < result.dim; ++i)
      ++result.histograms[static_cast<std::size_t>(i)][static_cast<std::size_t>(r.ranks[static_cast<std::size_t>(i)])];
  result.p_values.clear();
  const int trials = static_cast<int>(result.records.size());
  if (trials == 0) return;
  const auto band = binomial_band(trials, 1.0 / (result.n_samples + 1));
  result.band_lower = band.first;
  result.band_upper = band.second;
  for (const auto& h : result.histograms) result.p_values.push_back(chi_square_uniformity_p(h));
}

SbcResult sbc_ranks(const sim::Prior& prior, const sim::Simulator& simulator, const InferenceProcedure& inference,
                    int n_trials, int n_samples, std::uint64_t seed, int jobs) {
  if (n_trials < 1 || n_samples < 1) throw std::invalid_argument("sbc_ranks: counts must be >= 1");
  SbcResult result;
  result.n_samples = n_samples;
  result.dim = prior.dim();
  std::vector<std::optional<RankRecord>> slots(static_cast<std::size_t>(n_trials));
  parallel_for(slots.size(), jobs, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const ParamVector theta = prior.sample(rng);
    const auto x = simulator.simulate(theta, rng);
    if (!x || !x->allFinite()) return;
    std::vector<ParamVector> draws;
    try {
      draws = inference(*x, derive_seed(seed, t, 1));
    } catch (const std::exception&) {
      return;
    }
    if (static_cast<int>(draws.size()) != n_samples) return;
    RankRecord rec;
    rec.trial = static_cast<int>(t);
    for (int i = 0; i < result.dim; ++i) rec.ranks.push_back(rank_statistic(draws, theta, i));
    slots[t] = std::move(rec);
  });
  for (auto& s : slots) {
    if (s)
      result.records.push_back(std::move(*s));
    else
      ++result.skipped;
  }
  summarize(result);
  return result;
}

}  // namespace snl::diagnostics
