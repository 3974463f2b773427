#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "snl/diagnostics/gof.hpp"
#include "snl/diagnostics/metrics.hpp"
#include "snl/diagnostics/sbc.hpp"
#include "snl/sim/registry.hpp"

using namespace snl;
using namespace snl::diagnostics;

namespace {

std::vector<Vector> normal_sample(int n, int d, double shift, Rng& rng) {
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i) out.push_back((standard_normal_vector(d, rng).array() + shift).matrix());
  return out;
}

// Plain-loop squared MMD with a full sort for the median.
double reference_mmd(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  std::vector<Vector> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> dist;
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) dist.push_back(std::sqrt((pooled[i] - pooled[j]).squaredNorm()));
  std::sort(dist.begin(), dist.end());
  const std::size_t k = dist.size() / 2;
  const double h = dist.size() % 2 ? dist[k] : 0.5 * (dist[k - 1] + dist[k]);
  auto kern = [h](const Vector& x, const Vector& y) { return std::exp(-(x - y).squaredNorm() / (2 * h * h)); };
  long double xx = 0, yy = 0, xy = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) xx += kern(a[i], a[j]);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j) yy += kern(b[i], b[j]);
  for (const auto& x : a)
    for (const auto& y : b) xy += kern(x, y);
  const double m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
  const double sq = static_cast<double>(xx / (m * (m - 1)) + yy / (n * (n - 1)) - 2 * xy / (m * n));
  return std::sqrt(std::max(0.0, sq));
}

double binomial_pmf(int n, int k, double p) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                  (n - k) * std::log1p(-p));
}

// theta ~ N(0, I) in 2-D (box far out in the tails), x ~ N(theta, 0.25 I).
constexpr double kNoiseVar = 0.25;

sim::Prior conjugate_prior() {
  return sim::Prior::gaussian_times_box(Vector::Zero(2), 1.0, Vector::Constant(2, -9.0), Vector::Constant(2, 9.0));
}

sim::FunctionSimulator conjugate_simulator() {
  return sim::FunctionSimulator(2, 2, [](const ParamVector& t, Rng& rng) {
    return std::optional<DataVector>(t + std::sqrt(kNoiseVar) * standard_normal_vector(2, rng));
  });
}

std::vector<ParamVector> exact_posterior(const DataVector& x, int n, Rng& rng) {
  const double var = kNoiseVar / (1.0 + kNoiseVar);
  const Vector mean = x / (1.0 + kNoiseVar);
  std::vector<ParamVector> out;
  for (int i = 0; i < n; ++i) out.push_back(mean + std::sqrt(var) * standard_normal_vector(2, rng));
  return out;
}

}  // namespace

TEST_CASE("mmd: exact symmetry and permutation invariance") {
  Rng rng(1);
  auto a = normal_sample(300, 2, 0.0, rng);
  auto b = normal_sample(250, 2, 0.5, rng);
  CHECK(mmd(a, b) == mmd(b, a));
  const double before = mmd(a, b);
  std::reverse(a.begin(), a.end());
  std::rotate(b.begin(), b.begin() + 17, b.end());
  CHECK(mmd(a, b) == doctest::Approx(before).epsilon(1e-12));
  CHECK(mmd(a, a) == 0.0);
}

TEST_CASE("mmd: same-distribution samples sit inside the permutation null") {
  Rng rng(2);
  const auto a = normal_sample(1000, 1, 0.0, rng);
  const auto b = normal_sample(1000, 1, 0.0, rng);
  const double observed = mmd(a, b);
  CHECK(observed < 0.1);

  std::vector<Vector> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  int exceed = 0;
  const int perms = 40;
  for (int p = 0; p < perms; ++p) {
    std::shuffle(pooled.begin(), pooled.end(), rng);
    const std::vector<Vector> left(pooled.begin(), pooled.begin() + 1000), right(pooled.begin() + 1000, pooled.end());
    exceed += mmd(left, right) >= observed ? 1 : 0;
  }
  MESSAGE("observed " << observed << " permutation p " << static_cast<double>(exceed + 1) / (perms + 1));
  CHECK(static_cast<double>(exceed + 1) / (perms + 1) > 0.05);
}

TEST_CASE("mmd: matches an independently coded estimator") {
  Rng rng(3);
  const auto a = normal_sample(1000, 2, 0.0, rng);
  const auto b = normal_sample(1000, 2, 5.0, rng);
  const double ours = mmd(a, b);
  const double theirs = reference_mmd(a, b);
  CHECK(std::abs(ours - theirs) < 1e-10);
  CHECK(ours > 0.5);
}

TEST_CASE("mmd: rejects single points and mixed dimensions") {
  const std::vector<Vector> one{Vector::Zero(2)};
  const std::vector<Vector> two{Vector::Zero(2), Vector::Ones(2)};
  const std::vector<Vector> other{Vector::Zero(3), Vector::Ones(3)};
  CHECK_THROWS_AS(mmd(one, two), std::invalid_argument);
  CHECK_THROWS_AS(mmd(two, other), std::invalid_argument);
  CHECK_THROWS_AS(mmd_squared(two, two, 0.0), std::invalid_argument);
}

TEST_CASE("kde_log_prob: single kernel, analytic normal, translation and order") {
  const Vector p = (Vector(2) << 0.3, -1.2).finished();
  const Vector h = (Vector(2) << 0.4, 0.7).finished();
  CHECK(kde_log_prob({p}, p, h) == doctest::Approx(-kLog2Pi - std::log(0.4) - std::log(0.7)).epsilon(1e-14));

  Rng rng(4);
  const auto s = normal_sample(100000, 2, 0.0, rng);
  const double at_origin = kde_log_prob(s, Vector::Zero(2));
  MESSAGE("kde at origin " << at_origin << " vs " << -kLog2Pi);
  CHECK(std::abs(at_origin + kLog2Pi) < 0.05);

  std::vector<Vector> small(s.begin(), s.begin() + 500);
  const Vector probe = (Vector(2) << 0.4, 0.1).finished();
  const double base = kde_log_prob(small, probe);
  std::vector<Vector> moved = small;
  const Vector shift = (Vector(2) << 3.0, -2.0).finished();
  for (auto& v : moved) v += shift;
  CHECK(std::abs(kde_log_prob(moved, probe + shift) - base) < 1e-12);

  std::vector<Vector> shuffled = small;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(kde_log_prob(shuffled, probe) == base);
}

TEST_CASE("kde_log_prob: a constant coordinate falls back to the bandwidth floor") {
  std::vector<Vector> s;
  Rng rng(5);
  for (int i = 0; i < 50; ++i) s.push_back((Vector(2) << standard_normal(rng), 2.0).finished());
  const double v = kde_log_prob(s, (Vector(2) << 0.0, 2.0).finished());
  CHECK(std::isfinite(v));
  CHECK(v > -std::log(kBandwidthFloor) - 5.0);
  CHECK_THROWS_AS(kde_log_prob({Vector::Zero(2)}, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("median_distance: definition and independent oracle") {
  const DataVector xo = (DataVector(2) << 1.0, 1.0).finished();
  CHECK(median_distance(std::vector<DataVector>(7, xo), xo) == 0.0);
  const std::vector<DataVector> three{xo, xo + (DataVector(2) << 3.0, 0.0).finished(),
                                      xo + (DataVector(2) << 6.0, 8.0).finished()};
  CHECK(median_distance(three, xo) == 3.0);

  Rng rng(6);
  for (int n : {101, 100}) {
    std::vector<DataVector> pts;
    std::vector<double> norms;
    for (int i = 0; i < n; ++i) {
      pts.push_back(standard_normal_vector(2, rng) * 3.0);
      norms.push_back(std::hypot(pts.back()(0) - xo(0), pts.back()(1) - xo(1)));
    }
    std::sort(norms.begin(), norms.end());
    const double oracle = n % 2 ? norms[static_cast<std::size_t>(n / 2)]
                                : 0.5 * (norms[static_cast<std::size_t>(n / 2 - 1)] + norms[static_cast<std::size_t>(n / 2)]);
    CHECK(std::abs(median_distance(pts, xo) - oracle) < 1e-12);
  }

  flow::SimulationStore store;
  store.add(1, ParamVector::Zero(1), xo);
  store.add(2, ParamVector::Zero(1), xo + DataVector::Constant(2, 1.0));
  CHECK(median_distance(store, xo, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(median_distance(store, xo, 3), std::invalid_argument);
}

TEST_CASE("chi-square and binomial band against closed forms") {
  // Two bins: the statistic has one degree of freedom and p = erfc(sqrt(stat / 2)).
  const std::vector<int> counts{60, 40};
  const double stat = 2.0 * 100.0 / 50.0;
  CHECK(chi_square_uniformity_p(counts) == doctest::Approx(std::erfc(std::sqrt(stat / 2.0))).epsilon(1e-10));
  CHECK(chi_square_uniformity_p({25, 25, 25, 25}) == doctest::Approx(1.0));

  const auto [lo, hi] = binomial_band(200, 0.1, 0.99);
  double below = 0.0, above = 0.0;
  for (int k = 0; k < lo; ++k) below += binomial_pmf(200, k, 0.1);
  for (int k = hi + 1; k <= 200; ++k) above += binomial_pmf(200, k, 0.1);
  MESSAGE("band [" << lo << ", " << hi << "]");
  CHECK(below <= 0.005);
  CHECK(above <= 0.005);
  CHECK(below + binomial_pmf(200, lo, 0.1) > 0.005);
  CHECK(above + binomial_pmf(200, hi, 0.1) > 0.005);
}

TEST_CASE("sbc_ranks: exact posterior sampler is calibrated") {
  const auto prior = conjugate_prior();
  const auto sim = conjugate_simulator();
  const InferenceProcedure exact = [](const DataVector& x, std::uint64_t seed) {
    Rng rng(seed);
    return exact_posterior(x, 9, rng);
  };
  const SbcResult r = sbc_ranks(prior, sim, exact, 200, 9, 11, 2);
  CHECK(r.records.size() == 200);
  CHECK(r.skipped == 0);
  REQUIRE(r.histograms.size() == 2);
  for (int i = 0; i < 2; ++i) {
    const auto& h = r.histograms[static_cast<std::size_t>(i)];
    CHECK(h.size() == 10);
    CHECK(std::accumulate(h.begin(), h.end(), 0) == 200);
    MESSAGE("param " << i << " p " << r.p_values[static_cast<std::size_t>(i)]);
    CHECK(r.p_values[static_cast<std::size_t>(i)] > 0.01);
  }
  for (const auto& rec : r.records)
    for (int k : rec.ranks) {
      CHECK(k >= 0);
      CHECK(k <= 9);
    }
  CHECK(r.band_lower < 20);
  CHECK(r.band_upper > 20);
}

TEST_CASE("sbc_ranks: a collapsed posterior piles ranks at the ends") {
  const auto prior = conjugate_prior();
  const auto sim = conjugate_simulator();
  const InferenceProcedure at_mean = [](const DataVector&, std::uint64_t) {
    return std::vector<ParamVector>(9, ParamVector::Zero(2));
  };
  const SbcResult r = sbc_ranks(prior, sim, at_mean, 200, 9, 12);
  for (int i = 0; i < 2; ++i) {
    const auto& h = r.histograms[static_cast<std::size_t>(i)];
    CHECK(h.front() + h.back() == 200);
    CHECK(h.front() > r.band_upper);
    CHECK(h.back() > r.band_upper);
    CHECK(r.p_values[static_cast<std::size_t>(i)] < 1e-10);
  }
}

TEST_CASE("sbc_ranks: failing trials are skipped and counted, results are deterministic") {
  const auto prior = conjugate_prior();
  const auto sim = conjugate_simulator();
  const InferenceProcedure flaky = [](const DataVector& x, std::uint64_t seed) {
    if (x(0) > 1.0) throw std::runtime_error("no convergence");
    Rng rng(seed);
    return exact_posterior(x, 9, rng);
  };
  const SbcResult a = sbc_ranks(prior, sim, flaky, 60, 9, 13, 1);
  const SbcResult b = sbc_ranks(prior, sim, flaky, 60, 9, 13, 3);
  CHECK(a.skipped > 0);
  CHECK(a.skipped + static_cast<int>(a.records.size()) == 60);
  CHECK(a.histograms == b.histograms);
}

TEST_CASE("gof: a sampler that is the simulator matches the simulator-vs-simulator null") {
  const auto sim = conjugate_simulator();
  const ParamVector theta = (ParamVector(2) << 0.5, -0.3).finished();
  const ConditionalSampler itself = [&sim](const ParamVector& t, int n, Rng& rng) {
    std::vector<DataVector> out;
    for (int i = 0; i < n; ++i) out.push_back(*sim.simulate(t, rng));
    return out;
  };
  const double observed = sampler_gof(itself, sim, theta, 300, 21);
  Rng rng(22);
  int exceed = 0;
  const int reps = 40;
  for (int r = 0; r < reps; ++r) {
    std::vector<Vector> a, b;
    for (int i = 0; i < 300; ++i) {
      a.push_back(*sim.simulate(theta, rng));
      b.push_back(*sim.simulate(theta, rng));
    }
    exceed += mmd(a, b) >= observed ? 1 : 0;
  }
  CHECK(static_cast<double>(exceed + 1) / (reps + 1) > 0.05);
  CHECK(sampler_gof(itself, sim, theta, 300, 21) == observed);
}

TEST_CASE("gof: untrained flow fits the toy simulator worse than a Gaussian") {
  const sim::Model toy = sim::make_model("toy");
  flow::FlowConfig fc;
  fc.data_dim = toy.simulator->data_dim();
  fc.cond_dim = toy.prior.dim();
  const flow::ConditionalMaf untrained(fc, 1);
  const double flow_value = likelihood_gof(untrained, *toy.simulator, toy.true_theta, 500, 5);
  const double gauss_value = gaussian_gof(*toy.simulator, toy.true_theta, 500, 5);
  MESSAGE("untrained " << flow_value << " gaussian " << gauss_value);
  CHECK(flow_value > gauss_value);
  CHECK(likelihood_gof(untrained, *toy.simulator, toy.true_theta, 500, 5) == flow_value);
  CHECK(gaussian_gof(*toy.simulator, toy.true_theta, 500, 5, 2) == gauss_value);
}
