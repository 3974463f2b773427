#include "snl/diagnostics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snl::diagnostics {

namespace {

double median_in_place(std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)) + upper);
}

bool lex_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Orders two samples canonically so symmetric statistics do not depend on
// argument order.
bool sample_less(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), lex_less);
}

void check_samples(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("mmd: each sample needs at least two points");
  const Eigen::Index d = a.front().size();
  for (const auto* s : {&a, &b})
    for (const auto& p : *s)
      if (p.size() != d) throw std::invalid_argument("mmd: dimension mismatch");
}

double kernel_sum(const std::vector<Vector>& a, const std::vector<Vector>& b, double inv_two_h2, bool same) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = same ? i + 1 : 0; j < b.size(); ++j)
      total += std::exp(-(a[i] - b[j]).squaredNorm() * inv_two_h2);
  return same ? 2.0 * total : total;
}

}  // namespace

double median_pairwise_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  std::vector<const Vector*> pooled;
  pooled.reserve(a.size() + b.size());
  for (const auto& p : a) pooled.push_back(&p);
  for (const auto& p : b) pooled.push_back(&p);
  std::vector<double> d;
  d.reserve(pooled.size() * (pooled.size() - 1) / 2);
  for (std::size_t i = 0; i < pooled.size(); ++i)
    for (std::size_t j = i + 1; j < pooled.size(); ++j) d.push_back((*pooled[i] - *pooled[j]).norm());
  return median_in_place(d);
}

double mmd_squared(const std::vector<Vector>& a, const std::vector<Vector>& b, double bandwidth) {
  check_samples(a, b);
  if (!(bandwidth > 0.0)) throw std::invalid_argument("mmd: bandwidth must be positive");
  const bool swap = sample_less(b, a);
  const auto& x = swap ? b : a;
  const auto& y = swap ? a : b;
  const double c = 1.0 / (2.0 * bandwidth * bandwidth);
  const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
  const double kxx = kernel_sum(x, x, c, true) / (m * (m - 1.0));
  const double kyy = kernel_sum(y, y, c, true) / (n * (n - 1.0));
  const double kxy = kernel_sum(x, y, c, false) / (m * n);
  return kxx + kyy - 2.0 * kxy;
}

double mmd(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  check_samples(a, b);
  double h = median_pairwise_distance(a, b);
  if (!(h > 0.0)) h = 1.0;  // every pooled point identical
  return std::sqrt(std::max(0.0, mmd_squared(a, b, h)));
}

double kde_log_prob(const std::vector<Vector>& samples, const Vector& point, const Vector& bandwidth) {
  if (samples.empty()) throw std::invalid_argument("kde_log_prob: no samples");
  const Eigen::Index d = point.size();
  if (bandwidth.size() != d) throw std::invalid_argument("kde_log_prob: bandwidth dimension mismatch");
  std::vector<Vector> sorted = samples;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  const double log_norm = -0.5 * static_cast<double>(d) * kLog2Pi - bandwidth.array().log().sum();
  std::vector<double> terms;
  terms.reserve(sorted.size());
  for (const auto& s : sorted) {
    if (s.size() != d) throw std::invalid_argument("kde_log_prob: dimension mismatch");
    terms.push_back(-0.5 * (s - point).cwiseQuotient(bandwidth).squaredNorm());
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc) + log_norm - std::log(static_cast<double>(sorted.size()));
}

double kde_log_prob(const std::vector<Vector>& samples, const Vector& point) {
  if (samples.size() < 2) throw std::invalid_argument("kde_log_prob: need at least two samples");
  std::vector<Vector> sorted = samples;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  const Matrix s = stack_columns(sorted);
  const Vector mean = s.rowwise().mean();
  const Vector sd = ((s.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(s.cols() - 1)).sqrt();
  const double n = static_cast<double>(s.cols());
  const double factor = std::pow(n, -1.0 / (static_cast<double>(point.size()) + 4.0));
  const Vector h = (sd * factor).cwiseMax(kBandwidthFloor);
  return kde_log_prob(sorted, point, h);
}

double median_distance(const std::vector<DataVector>& points, const DataVector& target) {
  if (points.empty()) throw std::invalid_argument("median_distance: no points");
  std::vector<double> d;
  d.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != target.size()) throw std::invalid_argument("median_distance: dimension mismatch");
    d.push_back((p - target).norm());
  }
  return median_in_place(d);
}

double median_distance(const flow::SimulationStore& store, const DataVector& target, int round) {
  const auto xs = store.xs_in_round(round);
  if (xs.empty()) throw std::invalid_argument("median_distance: round " + std::to_string(round) + " is empty");
  return median_distance(xs, target);
}

}  // namespace snl::diagnostics
