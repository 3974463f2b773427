#include "snl/sim/lotka_volterra.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "snl/sim/gillespie.hpp"

namespace snl::sim {

PopulationSeries lotka_volterra_series(const ParamVector& theta, Rng& rng, const LotkaVolterraSetup& setup) {
  if (theta.size() != 4 || !theta.allFinite()) throw std::invalid_argument("lotka_volterra: need 4 finite parameters");
  const double birth = std::exp(theta(0)), death = std::exp(theta(1));
  const double prey_birth = std::exp(theta(2)), eaten = std::exp(theta(3));
  JumpProcess process;
  process.change = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  process.rates = [=](const std::vector<long>& s, std::vector<double>& r) {
    const double x = static_cast<double>(s[0]), y = static_cast<double>(s[1]);
    r[0] = birth * x * y;
    r[1] = death * x;
    r[2] = prey_birth * y;
    r[3] = eaten * x * y;
  };
  const JumpPath path =
      gillespie(process, {setup.predators, setup.prey}, setup.interval, setup.n_records(), setup.max_events, rng);

  PopulationSeries out;
  out.events = path.events;
  out.diverged = path.capped;
  out.predators.reserve(path.records.size());
  out.prey.reserve(path.records.size());
  for (const auto& s : path.records) {
    out.predators.push_back(static_cast<double>(s[0]));
    out.prey.push_back(static_cast<double>(s[1]));
  }
  return out;
}

namespace {

struct Standardized {
  double mean = 0.0;
  double var = 0.0;
  std::vector<double> z;  // empty for a constant series
};

Standardized standardize(const std::vector<double>& v) {
  Standardized s;
  const auto n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.var = ss / (n - 1.0);
  if (s.var > 0.0) {
    const double sd = std::sqrt(s.var);
    s.z.reserve(v.size());
    for (double x : v) s.z.push_back((x - s.mean) / sd);
  }
  return s;
}

double lagged_product(const std::vector<double>& a, const std::vector<double>& b, std::size_t lag) {
  if (a.empty() || b.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t t = 0; t + lag < a.size(); ++t) acc += a[t] * b[t + lag];
  return acc / static_cast<double>(a.size() - 1);
}

}  // namespace

DataVector lotka_volterra_features(const PopulationSeries& series) {
  if (series.predators.size() != series.prey.size() || series.predators.size() < 3)
    throw std::invalid_argument("lotka_volterra_features: need two equal-length series of at least 3 points");
  const Standardized x = standardize(series.predators);
  const Standardized y = standardize(series.prey);
  DataVector f(9);
  f << x.mean, y.mean, std::log(std::max(x.var, kVarianceFloor)), std::log(std::max(y.var, kVarianceFloor)),
      lagged_product(x.z, x.z, 1), lagged_product(x.z, x.z, 2), lagged_product(y.z, y.z, 1),
      lagged_product(y.z, y.z, 2), lagged_product(x.z, y.z, 0);
  return f;
}

std::optional<DataVector> LotkaVolterraSimulator::simulate(const ParamVector& theta, Rng& rng) const {
  if (theta.size() != 4 || !theta.allFinite()) return std::nullopt;
  const DataVector f = lotka_volterra_features(lotka_volterra_series(theta, rng));
  if (!f.allFinite()) return std::nullopt;
  return whitening_ ? whitening_->apply(f) : f;
}

}  // namespace snl::sim
