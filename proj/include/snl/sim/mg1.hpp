#pragma once

#include <optional>

#include "snl/sim/simulator.hpp"
#include "snl/sim/whitening.hpp"

namespace snl::sim {

// Linear interpolation between order statistics (type 7). `sorted` ascending.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Single-server queue: service times U(t1, t2), exponential inter-arrival
// times with rate t3. Returns the 0/25/50/75/100% quantiles of the
// inter-departure times, optionally whitened.
class Mg1Simulator final : public Simulator {
 public:
  static constexpr int kCustomers = 50;

  Mg1Simulator() = default;
  explicit Mg1Simulator(Whitening whitening) : whitening_(std::move(whitening)) {}

  int param_dim() const override { return 3; }
  int data_dim() const override { return 5; }
  // nullopt when t3 <= 0 or t2 < t1 or t1 < 0.
  std::optional<DataVector> simulate(const ParamVector& theta, Rng& rng) const override;

  // Raw inter-departure times d_i - d_{i-1}, i = 1..kCustomers.
  static std::vector<double> inter_departures(const ParamVector& theta, Rng& rng);
  static DataVector raw_quantiles(const ParamVector& theta, Rng& rng);

  const std::optional<Whitening>& whitening() const { return whitening_; }

 private:
  std::optional<Whitening> whitening_;
};

}  // namespace snl::sim
