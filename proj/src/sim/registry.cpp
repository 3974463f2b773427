#include "snl/sim/registry.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "snl/sim/lotka_volterra.hpp"
#include "snl/sim/mg1.hpp"
#include "snl/sim/toy.hpp"

namespace snl::sim {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::string joined_names() {
  std::string s;
  for (const auto& n : model_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

template <class Raw>
std::vector<DataVector> pilot_run(const Prior& prior, Raw raw) {
  Rng rng(kPilotSeed);
  std::vector<DataVector> out;
  out.reserve(kPilotSize);
  while (static_cast<int>(out.size()) < kPilotSize) {
    const ParamVector theta = prior.sample(rng);
    std::optional<DataVector> x = raw(theta, rng);
    if (x && x->allFinite()) out.push_back(std::move(*x));
  }
  return out;
}

Model build_toy() {
  Model m;
  m.name = "toy";
  m.prior_name = "uniform";
  m.prior = Prior::uniform_box(Vector::Constant(5, -3.0), Vector::Constant(5, 3.0));
  auto sim = std::make_shared<ToySimulator>();
  m.true_theta = vec({0.7, -2.9, -1.0, -0.9, 0.6});
  Rng rng(kObservationSeed);
  m.observed = *sim->simulate(m.true_theta, rng);
  m.observed_raw = m.observed;
  m.simulator = sim;
  return m;
}

Model build_mg1() {
  Model m;
  m.name = "mg1";
  m.prior_name = "uniform";
  m.prior = Prior::queue(10.0, 10.0, 1.0 / 3.0);
  m.true_theta = vec({1.0, 5.0, 0.2});
  const auto pilot = pilot_run(m.prior, [](const ParamVector& theta, Rng& rng) -> std::optional<DataVector> {
    if (!(theta(2) > 0.0)) return std::nullopt;
    return Mg1Simulator::raw_quantiles(theta, rng);
  });
  m.whitening = fit_whitening(pilot, WhiteningMode::full);
  Rng rng(kObservationSeed);
  m.observed_raw = Mg1Simulator::raw_quantiles(m.true_theta, rng);
  m.observed = m.whitening->apply(m.observed_raw);
  m.simulator = std::make_shared<Mg1Simulator>(*m.whitening);
  return m;
}

Model build_lotka_volterra(const std::string& prior_name) {
  Model m;
  m.name = "lotka_volterra";
  m.prior_name = prior_name;
  m.true_theta = vec({std::log(0.01), std::log(0.5), std::log(1.0), std::log(0.01)});
  const Vector lo = Vector::Constant(4, -5.0), hi = Vector::Constant(4, 2.0);
  m.prior = prior_name == "oscillating" ? Prior::gaussian_times_box(m.true_theta, 0.5, lo, hi)
                                        : Prior::uniform_box(lo, hi);
  const auto pilot = pilot_run(m.prior, [](const ParamVector& theta, Rng& rng) -> std::optional<DataVector> {
    return lotka_volterra_features(lotka_volterra_series(theta, rng));
  });
  m.whitening = fit_whitening(pilot, WhiteningMode::diagonal);
  Rng rng(kObservationSeed);
  m.observed_raw = lotka_volterra_features(lotka_volterra_series(m.true_theta, rng));
  m.observed = m.whitening->apply(m.observed_raw);
  m.simulator = std::make_shared<LotkaVolterraSimulator>(*m.whitening);
  return m;
}

}  // namespace

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"toy", "mg1", "lotka_volterra"};
  return names;
}

std::vector<std::string> prior_names(const std::string& model) {
  if (model == "toy" || model == "mg1") return {"uniform"};
  if (model == "lotka_volterra") return {"broad", "oscillating"};
  throw UnknownModel("unknown model '" + model + "'; available: " + joined_names());
}

Model make_model(const std::string& name, const std::string& prior) {
  const auto priors = prior_names(name);
  const std::string chosen = prior.empty() ? priors.front() : prior;
  if (std::find(priors.begin(), priors.end(), chosen) == priors.end())
    throw std::invalid_argument("unknown prior '" + chosen + "' for model " + name);

  static std::mutex mutex;
  static std::map<std::string, Model> cache;
  const std::string key = name + "/" + chosen;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  Model m = name == "toy" ? build_toy() : name == "mg1" ? build_mg1() : build_lotka_volterra(chosen);
  cache.emplace(key, m);
  return m;
}

}  // namespace snl::sim
