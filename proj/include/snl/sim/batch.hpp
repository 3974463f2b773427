#pragma once

#include <optional>
#include <vector>

#include "snl/parallel.hpp"
#include "snl/sim/simulator.hpp"

namespace snl::sim {

// Simulates thetas[i] with its own generator seeded by
// derive_seed(seed, first_index + i), so results do not depend on `jobs`.
inline std::vector<std::optional<DataVector>> simulate_batch(const Simulator& simulator,
                                                             const std::vector<ParamVector>& thetas,
                                                             std::uint64_t seed, std::uint64_t first_index,
                                                             int jobs) {
  std::vector<std::optional<DataVector>> out(thetas.size());
  parallel_for(thetas.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, first_index + i));
    auto x = simulator.simulate(thetas[i], rng);
    if (x && x->allFinite()) out[i] = std::move(x);
  });
  return out;
}

}  // namespace snl::sim
