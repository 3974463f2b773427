#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace snl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Points in parameter space and summary-statistic space.
using ParamVector = Eigen::VectorXd;
using DataVector = Eigen::VectorXd;

using Rng = std::mt19937_64;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2Pi = 1.8378770664093454836;

// splitmix64 finalizer, used to derive independent RNG substreams from a base seed.
std::uint64_t mix_seed(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c);

double uniform01(Rng& rng);
double standard_normal(Rng& rng);
Vector standard_normal_vector(Eigen::Index n, Rng& rng);

// Columns of the returned matrix are the given points.
Matrix stack_columns(const std::vector<Vector>& points);
std::vector<Vector> unstack_columns(const Matrix& m);

bool all_finite(const Eigen::Ref<const Matrix>& m);

}  // namespace snl
