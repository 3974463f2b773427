#include "snl/sim/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace snl::sim {

namespace {

void check_box(const Vector& lower, const Vector& upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) throw std::invalid_argument("Prior: bad box dimensions");
  if (!lower.allFinite() || !upper.allFinite()) throw std::invalid_argument("Prior: bounds must be finite");
  if ((lower.array() >= upper.array()).any()) throw std::invalid_argument("Prior: lower must be < upper");
}

// log of P(lo <= Z <= hi), Z ~ N(0, 1)
double log_normal_mass(double lo, double hi) {
  const double p = 0.5 * (std::erfc(-hi / std::sqrt(2.0)) - std::erfc(-lo / std::sqrt(2.0)));
  return std::log(p);
}

}  // namespace

Prior Prior::uniform_box(Vector lower, Vector upper) {
  check_box(lower, upper);
  Prior p;
  p.kind_ = Kind::uniform_box;
  p.log_norm_ = -(upper - lower).array().log().sum();
  p.lower_ = std::move(lower);
  p.upper_ = std::move(upper);
  return p;
}

Prior Prior::gaussian_times_box(Vector center, double scale, Vector lower, Vector upper) {
  check_box(lower, upper);
  if (center.size() != lower.size() || !center.allFinite()) throw std::invalid_argument("Prior: bad center");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("Prior: scale must be positive");
  Prior p;
  p.kind_ = Kind::gaussian_times_box;
  double mass = 0.0;
  for (Eigen::Index i = 0; i < center.size(); ++i)
    mass += log_normal_mass((lower(i) - center(i)) / scale, (upper(i) - center(i)) / scale);
  if (!std::isfinite(mass)) throw std::invalid_argument("Prior: Gaussian has no mass inside the box");
  p.log_norm_ = -static_cast<double>(center.size()) * (0.5 * kLog2Pi + std::log(scale)) - mass;
  p.center_ = std::move(center);
  p.scale_ = scale;
  p.lower_ = std::move(lower);
  p.upper_ = std::move(upper);
  return p;
}

Prior Prior::queue(double service_min_hi, double service_width_hi, double arrival_rate_hi) {
  if (!(service_min_hi > 0) || !(service_width_hi > 0) || !(arrival_rate_hi > 0))
    throw std::invalid_argument("Prior: queue ranges must be positive");
  Prior p;
  p.kind_ = Kind::queue;
  p.lower_ = Vector::Zero(3);
  p.upper_ = Vector(3);
  p.upper_ << service_min_hi, service_min_hi + service_width_hi, arrival_rate_hi;
  p.log_norm_ = -std::log(service_min_hi * service_width_hi * arrival_rate_hi);
  return p;
}

bool Prior::in_support(const ParamVector& theta) const {
  if (theta.size() != lower_.size()) throw std::invalid_argument("Prior: dimension mismatch");
  if (!theta.allFinite()) return false;
  if ((theta.array() < lower_.array()).any() || (theta.array() > upper_.array()).any()) return false;
  if (kind_ == Kind::queue) {
    const double width = theta(1) - theta(0);
    if (width < 0.0 || width > upper_(1) - upper_(0)) return false;
  }
  return true;
}

double Prior::log_density(const ParamVector& theta) const {
  if (!in_support(theta)) return kNegInf;
  if (kind_ == Kind::gaussian_times_box) return log_norm_ - 0.5 * (theta - center_).squaredNorm() / (scale_ * scale_);
  return log_norm_;
}

ParamVector Prior::sample(Rng& rng) const {
  ParamVector theta(dim());
  switch (kind_) {
    case Kind::uniform_box:
      for (int i = 0; i < dim(); ++i) theta(i) = lower_(i) + (upper_(i) - lower_(i)) * uniform01(rng);
      break;
    case Kind::gaussian_times_box:
      // Per-axis rejection; the truncation is separable.
      for (int i = 0; i < dim(); ++i) {
        double v;
        do {
          v = center_(i) + scale_ * standard_normal(rng);
        } while (v < lower_(i) || v > upper_(i));
        theta(i) = v;
      }
      break;
    case Kind::queue:
      theta(0) = upper_(0) * uniform01(rng);
      theta(1) = theta(0) + (upper_(1) - upper_(0)) * uniform01(rng);
      theta(2) = upper_(2) * uniform01(rng);
      break;
  }
  return theta;
}

std::vector<ParamVector> Prior::sample(int n, Rng& rng) const {
  std::vector<ParamVector> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) out.push_back(sample(rng));
  return out;
}

std::string to_string(Prior::Kind kind) {
  switch (kind) {
    case Prior::Kind::uniform_box: return "uniform_box";
    case Prior::Kind::gaussian_times_box: return "gaussian_times_box";
    case Prior::Kind::queue: return "queue";
  }
  return "unknown";
}

nlohmann::ordered_json Prior::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind_);
  j["lower"] = std::vector<double>(lower_.data(), lower_.data() + lower_.size());
  j["upper"] = std::vector<double>(upper_.data(), upper_.data() + upper_.size());
  if (kind_ == Kind::gaussian_times_box) {
    j["center"] = std::vector<double>(center_.data(), center_.data() + center_.size());
    j["scale"] = scale_;
  }
  return j;
}

}  // namespace snl::sim
