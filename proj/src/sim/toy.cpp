#include "snl/sim/toy.hpp"

#include <cmath>
#include <stdexcept>

namespace snl::sim {

namespace {

void check_theta(const ParamVector& theta) {
  if (theta.size() != 5) throw std::invalid_argument("toy: theta must have 5 entries");
  if (!theta.allFinite()) throw std::invalid_argument("toy: theta must be finite");
}

}  // namespace

Eigen::Matrix2d ToySimulator::covariance(const ParamVector& theta) {
  check_theta(theta);
  const double s1 = theta(2) * theta(2);
  const double s2 = theta(3) * theta(3);
  const double rho = std::tanh(theta(4));
  Eigen::Matrix2d s;
  s << s1 * s1 + kJitter, rho * s1 * s2, rho * s1 * s2, s2 * s2 + kJitter;
  return s;
}

std::optional<DataVector> ToySimulator::simulate(const ParamVector& theta, Rng& rng) const {
  const Eigen::Matrix2d s = covariance(theta);
  // 2x2 Cholesky
  const double a = std::sqrt(s(0, 0));
  const double b = s(1, 0) / a;
  const double c = std::sqrt(std::max(s(1, 1) - b * b, 0.0));
  DataVector x(2 * kDraws);
  for (int j = 0; j < kDraws; ++j) {
    const double z1 = standard_normal(rng);
    const double z2 = standard_normal(rng);
    x(2 * j) = theta(0) + a * z1;
    x(2 * j + 1) = theta(1) + b * z1 + c * z2;
  }
  return x;
}

double toy_log_likelihood(const DataVector& x, const ParamVector& theta) {
  if (x.size() != 2 * ToySimulator::kDraws) throw std::invalid_argument("toy: x must have 8 entries");
  const Eigen::Matrix2d s = ToySimulator::covariance(theta);
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  double total = 0.0;
  for (int j = 0; j < ToySimulator::kDraws; ++j) {
    const double d1 = x(2 * j) - theta(0);
    const double d2 = x(2 * j + 1) - theta(1);
    const double q = (s(1, 1) * d1 * d1 - 2.0 * s(0, 1) * d1 * d2 + s(0, 0) * d2 * d2) / det;
    total += -kLog2Pi - 0.5 * std::log(det) - 0.5 * q;
  }
  return total;
}

}  // namespace snl::sim
