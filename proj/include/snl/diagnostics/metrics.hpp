#pragma once

#include <vector>

#include "snl/common.hpp"
#include "snl/flow/store.hpp"

namespace snl::diagnostics {

// Median of all pairwise Euclidean distances within the pooled sample.
double median_pairwise_distance(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Unbiased squared-MMD estimate with a Gaussian kernel of the given bandwidth.
double mmd_squared(const std::vector<Vector>& a, const std::vector<Vector>& b, double bandwidth);

// sqrt(max(0, unbiased squared MMD)), bandwidth = median pooled pairwise
// distance. Symmetric in its arguments bit for bit. Needs at least two points
// per sample.
double mmd(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Log density at `point` of a Gaussian kernel density estimate with Scott's
// rule bandwidth n^(-1/(d+4)) * per-dimension sd (floored at 1e-6). The
// samples are put in a canonical order first, so the result does not depend
// on their order.
double kde_log_prob(const std::vector<Vector>& samples, const Vector& point);
double kde_log_prob(const std::vector<Vector>& samples, const Vector& point, const Vector& bandwidth);

inline constexpr double kBandwidthFloor = 1e-6;

// Median Euclidean distance from the points to `target`.
double median_distance(const std::vector<DataVector>& points, const DataVector& target);
// Same, over the records of one round of a store.
double median_distance(const flow::SimulationStore& store, const DataVector& target, int round);

}  // namespace snl::diagnostics
