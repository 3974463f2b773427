#pragma once

#include <string>

#include <json.hpp>

#include "snl/common.hpp"

namespace snl::sim {

// Priors used by the models. All have bounded support, so a bounding box is
// always available for MCMC bracket widths.
class Prior {
 public:
  enum class Kind {
    uniform_box,
    // N(center, scale^2 I) restricted to the box
    gaussian_times_box,
    // theta1 ~ U(lo1, hi1), theta2 - theta1 ~ U(0, w), theta3 ~ U(lo3, hi3)
    queue,
  };

  static Prior uniform_box(Vector lower, Vector upper);
  static Prior gaussian_times_box(Vector center, double scale, Vector lower, Vector upper);
  static Prior queue(double service_min_hi, double service_width_hi, double arrival_rate_hi);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double scale() const { return scale_; }

  bool in_support(const ParamVector& theta) const;
  // Normalized log density; -infinity outside the support.
  double log_density(const ParamVector& theta) const;
  ParamVector sample(Rng& rng) const;
  std::vector<ParamVector> sample(int n, Rng& rng) const;

  nlohmann::ordered_json to_json() const;

 private:
  Kind kind_ = Kind::uniform_box;
  Vector lower_, upper_;
  Vector center_;
  double scale_ = 0.0;
  double log_norm_ = 0.0;
};

std::string to_string(Prior::Kind kind);

}  // namespace snl::sim
