#pragma once

#include <optional>

#include "snl/sim/simulator.hpp"
#include "snl/sim/whitening.hpp"

namespace snl::sim {

struct PopulationSeries {
  std::vector<double> predators;
  std::vector<double> prey;
  std::uint64_t events = 0;
  bool diverged = false;
};

struct LotkaVolterraSetup {
  long predators = 50;
  long prey = 100;
  double horizon = 30.0;
  double interval = 0.2;
  std::uint64_t max_events = 30000;

  int n_records() const { return static_cast<int>(std::lround(horizon / interval)) + 1; }
};

// Reactions with rates exp(t1) X Y (predator birth), exp(t2) X (predator
// death), exp(t3) Y (prey birth), exp(t4) X Y (prey eaten).
PopulationSeries lotka_volterra_series(const ParamVector& theta, Rng& rng, const LotkaVolterraSetup& setup = {});

inline constexpr double kVarianceFloor = 1e-12;

// mean X, mean Y, log var X, log var Y, autocorr X lag 1, 2,
// autocorr Y lag 1, 2, cross-correlation X-Y.
// Variances use n - 1 and are floored at kVarianceFloor; correlations of a
// constant series are 0.
DataVector lotka_volterra_features(const PopulationSeries& series);

class LotkaVolterraSimulator final : public Simulator {
 public:
  LotkaVolterraSimulator() = default;
  explicit LotkaVolterraSimulator(Whitening whitening) : whitening_(std::move(whitening)) {}

  int param_dim() const override { return 4; }
  int data_dim() const override { return 9; }
  std::optional<DataVector> simulate(const ParamVector& theta, Rng& rng) const override;

  const std::optional<Whitening>& whitening() const { return whitening_; }

 private:
  std::optional<Whitening> whitening_;
};

}  // namespace snl::sim
