#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snl/sim/prior.hpp"
#include "snl/sim/simulator.hpp"
#include "snl/sim/whitening.hpp"

namespace snl::sim {

inline constexpr std::uint64_t kPilotSeed = 1;
inline constexpr std::uint64_t kObservationSeed = 42;
inline constexpr int kPilotSize = 1000;

struct Model {
  std::string name;
  std::string prior_name;
  Prior prior;
  std::shared_ptr<const Simulator> simulator;
  ParamVector true_theta;
  // Observed data as the simulator reports it, and before whitening.
  DataVector observed;
  DataVector observed_raw;
  std::optional<Whitening> whitening;
};

class UnknownModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// "toy", "mg1", "lotka_volterra"
const std::vector<std::string>& model_names();
// Valid prior names for a model; the first is the default.
std::vector<std::string> prior_names(const std::string& model);

// Builds a model. Whitening is fitted on kPilotSize prior simulations drawn
// with kPilotSeed, and the observation is simulated at the true parameters with
// kObservationSeed. Results are cached per (model, prior).
Model make_model(const std::string& name, const std::string& prior = "");

}  // namespace snl::sim
