#include "snl/sim/gillespie.hpp"

#include <cmath>
#include <stdexcept>

namespace snl::sim {

JumpPath gillespie(const JumpProcess& process, std::vector<long> initial, double interval, int n_records,
                   std::uint64_t max_events, Rng& rng) {
  if (n_records < 1) throw std::invalid_argument("gillespie: n_records must be >= 1");
  if (!(interval > 0.0)) throw std::invalid_argument("gillespie: interval must be positive");
  for (const auto& c : process.change)
    if (c.size() != initial.size()) throw std::invalid_argument("gillespie: change vector size mismatch");

  JumpPath path;
  path.records.reserve(static_cast<std::size_t>(n_records));
  std::vector<long> state = std::move(initial);
  std::vector<double> rates(process.change.size());
  double t = 0.0;
  int k = 0;

  while (k < n_records) {
    process.rates(state, rates);
    double total = 0.0;
    for (double r : rates) {
      if (!(r >= 0.0)) throw std::domain_error("gillespie: propensities must be non-negative");
      total += r;
    }
    if (total == 0.0 || !std::isfinite(total)) {
      path.capped = !std::isfinite(total);
      while (k < n_records) path.records.push_back(state), ++k;
      break;
    }
    const double next = t - std::log1p(-uniform01(rng)) / total;
    while (k < n_records && interval * k < next) path.records.push_back(state), ++k;
    if (k == n_records) break;
    if (path.events >= max_events) {
      // Hold the populations for the rest of the horizon.
      path.capped = true;
      while (k < n_records) path.records.push_back(state), ++k;
      break;
    }

    double pick = uniform01(rng) * total;
    std::size_t r = 0;
    for (; r + 1 < rates.size(); ++r) {
      if (pick < rates[r]) break;
      pick -= rates[r];
    }
    // Guard against round-off landing on a zero-rate reaction.
    while (rates[r] == 0.0 && r > 0) --r;
    const auto& change = process.change[r];
    for (std::size_t s = 0; s < state.size(); ++s) state[s] += change[s];
    t = next;
    ++path.events;
  }
  return path;
}

}  // namespace snl::sim
