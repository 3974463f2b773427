#pragma once

#include <Eigen/Dense>

#include "snl/sim/simulator.hpp"

namespace snl::sim {

// Five parameters, four i.i.d. bivariate Gaussian draws:
//   mean (t1, t2), scales s1 = t3^2, s2 = t4^2, correlation tanh(t5),
//   covariance [[s1^2, r s1 s2], [r s1 s2, s2^2]] + 1e-8 I.
class ToySimulator final : public Simulator {
 public:
  static constexpr int kDraws = 4;
  static constexpr double kJitter = 1e-8;

  int param_dim() const override { return 5; }
  int data_dim() const override { return 2 * kDraws; }
  std::optional<DataVector> simulate(const ParamVector& theta, Rng& rng) const override;

  static Eigen::Matrix2d covariance(const ParamVector& theta);
};

// Exact log p(x | theta) under the same jittered covariance.
double toy_log_likelihood(const DataVector& x, const ParamVector& theta);

}  // namespace snl::sim
