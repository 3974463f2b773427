#include "snl/sim/mg1.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snl::sim {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_sorted: p must be in [0, 1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

namespace {

bool valid(const ParamVector& theta) {
  return theta.size() == 3 && theta.allFinite() && theta(0) >= 0.0 && theta(1) >= theta(0) && theta(2) > 0.0;
}

}  // namespace

std::vector<double> Mg1Simulator::inter_departures(const ParamVector& theta, Rng& rng) {
  if (!valid(theta)) throw std::invalid_argument("mg1: need 0 <= t1 <= t2 and t3 > 0");
  std::vector<double> gaps(kCustomers);
  double arrival = 0.0, departure = 0.0;
  for (int i = 0; i < kCustomers; ++i) {
    const double service = theta(0) + (theta(1) - theta(0)) * uniform01(rng);
    arrival += -std::log1p(-uniform01(rng)) / theta(2);
    const double next = departure + service + std::max(0.0, arrival - departure);
    gaps[static_cast<std::size_t>(i)] = next - departure;
    departure = next;
  }
  return gaps;
}

DataVector Mg1Simulator::raw_quantiles(const ParamVector& theta, Rng& rng) {
  std::vector<double> gaps = inter_departures(theta, rng);
  std::sort(gaps.begin(), gaps.end());
  DataVector q(5);
  for (int k = 0; k < 5; ++k) q(k) = quantile_sorted(gaps, 0.25 * k);
  return q;
}

std::optional<DataVector> Mg1Simulator::simulate(const ParamVector& theta, Rng& rng) const {
  if (!valid(theta)) return std::nullopt;
  const DataVector q = raw_quantiles(theta, rng);
  return whitening_ ? whitening_->apply(q) : q;
}

}  // namespace snl::sim
