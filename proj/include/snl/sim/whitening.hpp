#pragma once

#include <vector>

#include <json.hpp>

#include "snl/common.hpp"

namespace snl::sim {

enum class WhiteningMode { full, diagonal };

// x -> map * (x - shift)
struct Whitening {
  WhiteningMode mode = WhiteningMode::full;
  Vector shift;
  Matrix map;

  int dim() const { return static_cast<int>(shift.size()); }
  DataVector apply(const DataVector& x) const;
  DataVector unapply(const DataVector& z) const;

  nlohmann::ordered_json to_json() const;
  static Whitening from_json(const nlohmann::ordered_json& j);
};

// Full mode: shift = mean, map = inverse Cholesky factor of the unbiased
// covariance. Diagonal mode: per-feature mean and standard deviation.
// Needs at least d + 2 points. A singular covariance gets 1e-8 * mean variance
// of jitter; if the map is still ill-conditioned (> 1e6) this throws.
Whitening fit_whitening(const std::vector<DataVector>& points, WhiteningMode mode);

}  // namespace snl::sim
