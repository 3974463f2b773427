#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "snl/common.hpp"

namespace snl::mcmc {

// Unnormalized log density; -infinity outside the support.
using LogTarget = std::function<double(const ParamVector&)>;

// Persistent state of an axis-aligned slice-sampling chain.
struct ChainState {
  ParamVector current;
  Vector widths;
  Rng rng;
  std::uint64_t sweeps = 0;
  std::uint64_t axis_updates = 0;
  std::uint64_t target_evaluations = 0;
  // Updates that left the point unchanged under SliceOptions::stay_when_exhausted.
  std::uint64_t stalled_updates = 0;
  // Cached log target at `current`; NaN means "re-evaluate".
  double current_log_target = std::numeric_limits<double>::quiet_NaN();

  ChainState() = default;
  ChainState(ParamVector start, Vector initial_widths, std::uint64_t seed);
};

struct SliceOptions {
  int max_doublings = 10;
  int max_shrinks = 1000;
  // For noisy (estimated) targets: re-evaluate the current point before
  // every axis update instead of reusing the cached value.
  bool refresh_current = false;
  // For noisy targets: when shrinkage hits the limit, or a refreshed current
  // value is -infinity, keep the point and count a stalled update instead of
  // throwing.
  bool stay_when_exhausted = false;
};

// One univariate slice update of `axis`: draw a level under the current
// density, place a bracket of the axis width at random around the point,
// double it until both ends fall outside the slice, then sample uniformly
// from the bracket, shrinking it towards the current point on rejection.
// Proposals are also checked with the doubling acceptability test so the
// update leaves the target invariant.
//
// Throws std::domain_error if the current point has zero density and
// std::runtime_error when shrinkage exceeds the configured limit.
void slice_update_axis(ChainState& state, int axis, const LogTarget& log_target, const SliceOptions& options = {});

// One pass over every axis in index order.
void sweep(ChainState& state, const LogTarget& log_target, const SliceOptions& options = {});

// Runs burn_in sweeps, then records the state after every `thin` sweeps
// until n_samples points are collected. The cached target value is refreshed
// first, so the same state can be carried over to a new target.
std::vector<ParamVector> run_chain(ChainState& state, const LogTarget& log_target, int n_samples, int burn_in,
                                   int thin, const SliceOptions& options = {});

}  // namespace snl::mcmc
