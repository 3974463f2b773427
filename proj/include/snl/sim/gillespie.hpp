#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "snl/common.hpp"

namespace snl::sim {

// A continuous-time Markov jump process over integer species counts.
struct JumpProcess {
  // change[r][s]: effect of reaction r on species s
  std::vector<std::vector<long>> change;
  // Fills one non-negative propensity per reaction.
  std::function<void(const std::vector<long>& state, std::vector<double>& rates)> rates;
};

struct JumpPath {
  // records[k] = state at time k * interval
  std::vector<std::vector<long>> records;
  std::uint64_t events = 0;
  bool capped = false;
};

// Exact stochastic simulation. Records the state at n_records equally spaced
// times starting at 0. After max_events reactions the state is held and
// `capped` is set.
JumpPath gillespie(const JumpProcess& process, std::vector<long> initial, double interval, int n_records,
                   std::uint64_t max_events, Rng& rng);

}  // namespace snl::sim
