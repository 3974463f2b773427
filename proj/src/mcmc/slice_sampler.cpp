#include "snl/mcmc/slice_sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snl::mcmc {

ChainState::ChainState(ParamVector start, Vector initial_widths, std::uint64_t seed)
    : current(std::move(start)), widths(std::move(initial_widths)), rng(seed) {
  if (current.size() != widths.size()) throw std::invalid_argument("ChainState: widths must match dimension");
  if ((widths.array() <= 0.0).any() || !widths.allFinite())
    throw std::invalid_argument("ChainState: widths must be positive and finite");
}

namespace {

struct AxisTarget {
  ChainState& state;
  int axis;
  const LogTarget& target;
  ParamVector point;

  double operator()(double value) {
    point(axis) = value;
    ++state.target_evaluations;
    const double f = target(point);
    return std::isnan(f) ? kNegInf : f;
  }
};

bool acceptable(AxisTarget& f, double x0, double x1, double level, double left, double right, double width) {
  bool differs = false;
  while (right - left > 1.1 * width) {
    const double mid = 0.5 * (left + right);
    if ((x0 < mid && x1 >= mid) || (x0 >= mid && x1 < mid)) differs = true;
    if (x1 < mid)
      right = mid;
    else
      left = mid;
    if (differs && level >= f(left) && level >= f(right)) return false;
  }
  return true;
}

}  // namespace

void slice_update_axis(ChainState& state, int axis, const LogTarget& log_target, const SliceOptions& options) {
  if (axis < 0 || axis >= state.current.size()) throw std::out_of_range("slice_update_axis: axis out of range");
  if (std::isnan(state.current_log_target) || options.refresh_current) {
    ++state.target_evaluations;
    state.current_log_target = log_target(state.current);
  }
  if (!(state.current_log_target > kNegInf)) {
    if (options.stay_when_exhausted) {
      ++state.stalled_updates;
      ++state.axis_updates;
      return;
    }
    throw std::domain_error("slice_update_axis: current point has zero target density");
  }

  Rng& rng = state.rng;
  AxisTarget f{state, axis, log_target, state.current};
  const double x0 = state.current(axis);
  const double width = state.widths(axis);
  const double level = state.current_log_target + std::log(uniform01(rng) + 0x1.0p-60);

  double left = x0 - width * uniform01(rng);
  double right = left + width;
  double f_left = f(left);
  double f_right = f(right);
  for (int k = options.max_doublings; k > 0 && (level < f_left || level < f_right); --k) {
    if (uniform01(rng) < 0.5) {
      left -= right - left;
      f_left = f(left);
    } else {
      right += right - left;
      f_right = f(right);
    }
  }

  const double outer_left = left, outer_right = right;
  for (int shrinks = 0;; ++shrinks) {
    if (shrinks >= options.max_shrinks) {
      if (options.stay_when_exhausted) {
        ++state.stalled_updates;
        break;
      }
      throw std::runtime_error("slice_update_axis: more than " + std::to_string(options.max_shrinks) +
                               " shrinkage steps on axis " + std::to_string(axis) + " at value " +
                               std::to_string(x0) + "; target looks pathological");
    }
    const double x1 = left + uniform01(rng) * (right - left);
    const double f1 = f(x1);
    if (level < f1 && acceptable(f, x0, x1, level, outer_left, outer_right, width)) {
      state.current(axis) = x1;
      state.current_log_target = f1;
      break;
    }
    if (x1 < x0)
      left = x1;
    else
      right = x1;
  }
  ++state.axis_updates;
}

void sweep(ChainState& state, const LogTarget& log_target, const SliceOptions& options) {
  for (int axis = 0; axis < state.current.size(); ++axis) slice_update_axis(state, axis, log_target, options);
  ++state.sweeps;
}

std::vector<ParamVector> run_chain(ChainState& state, const LogTarget& log_target, int n_samples, int burn_in,
                                   int thin, const SliceOptions& options) {
  if (n_samples < 1) throw std::invalid_argument("run_chain: n_samples must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("run_chain: burn_in must be >= 0");
  if (thin < 1) throw std::invalid_argument("run_chain: thin must be >= 1");
  state.current_log_target = std::numeric_limits<double>::quiet_NaN();

  for (int i = 0; i < burn_in; ++i) sweep(state, log_target, options);
  std::vector<ParamVector> samples;
  samples.reserve(static_cast<std::size_t>(n_samples));
  for (int n = 0; n < n_samples; ++n) {
    for (int t = 0; t < thin; ++t) sweep(state, log_target, options);
    samples.push_back(state.current);
  }
  return samples;
}

}  // namespace snl::mcmc
