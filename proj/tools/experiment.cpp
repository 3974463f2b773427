#include "experiment.hpp"

#include <algorithm>
#include <sstream>

#include <boost/version.hpp>

#include "artifacts.hpp"
#include "snl/baselines/smc_abc.hpp"
#include "snl/baselines/synthetic_likelihood.hpp"
#include "snl/diagnostics/metrics.hpp"
#include "snl/engine/snl.hpp"
#include "snl/flow/serialize.hpp"
#include "snl/sim/batch.hpp"
#include "snl/sim/toy.hpp"

namespace snl::cli {

namespace fs = std::filesystem;

namespace {

enum Stream : std::uint64_t { kPosterior = 101, kReference, kResample, kPrior, kInference };

constexpr const char* kVersion = "1.0.0";

engine::SnlConfig engine_config(const ExperimentConfig& c) {
  engine::SnlConfig e;
  e.rounds = c.method == "nl" ? 1 : c.rounds;
  e.sims_per_round = c.method == "nl" ? c.nl_sims : c.sims_per_round;
  e.burn_in = c.burn_in;
  e.seed = c.seed;
  e.jobs = c.jobs;
  e.flow.n_layers = c.flow_layers;
  e.flow.hidden_sizes = {c.flow_hidden, c.flow_hidden};
  e.train.max_epochs = c.flow_max_epochs;
  e.train.learning_rate = c.flow_learning_rate;
  return e;
}

baselines::SlConfig sl_config(const ExperimentConfig& c) {
  baselines::SlConfig s;
  s.sims_per_estimate = c.sl_sims_per_estimate;
  s.n_samples = c.sl_samples;
  s.burn_in = c.burn_in;
  s.seed = c.seed;
  s.jobs = c.jobs;
  return s;
}

baselines::SmcAbcConfig smc_config(const ExperimentConfig& c) {
  baselines::SmcAbcConfig s;
  s.particles = c.smc_particles;
  s.max_rounds = c.smc_max_rounds;
  s.simulation_budget = c.smc_budget;
  s.min_epsilon = c.smc_min_epsilon;
  s.seed = c.seed;
  s.jobs = c.jobs;
  return s;
}

std::vector<ParamVector> resample(const baselines::ParticlePopulation& pop, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cumulative;
  double acc = 0.0;
  for (double w : pop.weights) cumulative.push_back(acc += w);
  std::vector<ParamVector> out;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    out.push_back(pop.particles[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                      pop.particles.size() - 1)]);
  }
  return out;
}

nlohmann::ordered_json population_json(const baselines::ParticlePopulation& p) {
  nlohmann::ordered_json j;
  j["round"] = p.round;
  j["epsilon"] = p.epsilon;
  j["simulations"] = p.simulations;
  j["round_simulations"] = p.round_simulations;
  j["acceptance_rate"] = p.acceptance_rate;
  j["ess"] = p.ess();
  j["resampled"] = p.resampled;
  nlohmann::ordered_json particles = nlohmann::ordered_json::array();
  for (const auto& t : p.particles) particles.push_back(to_std(t));
  j["particles"] = std::move(particles);
  j["weights"] = p.weights;
  return j;
}

// Accuracy metrics for one set of posterior draws.
class Evaluator {
 public:
  Evaluator(const ExperimentConfig& c, const sim::Model& m) : config_(c), model_(m) {
    if (c.evaluate && m.name == "toy")
      reference_ = toy_reference_posterior(m, c.posterior_samples, derive_seed(c.seed, kReference));
  }

  void add(int round, std::uint64_t simulations, const std::vector<ParamVector>& draws) {
    if (!config_.evaluate) return;
    if (!reference_.empty()) row(round, simulations, "mmd", diagnostics::mmd(draws, reference_));
    row(round, simulations, "nlp_true", -diagnostics::kde_log_prob(draws, model_.true_theta));
  }
  void add_value(int round, std::uint64_t simulations, const std::string& metric, double v) {
    row(round, simulations, metric, v);
  }
  std::string csv() const { return "method,round,simulations,metric,value\n" + rows_.str(); }

 private:
  void row(int round, std::uint64_t simulations, const std::string& metric, double v) {
    rows_ << config_.method << ',' << round << ',' << simulations << ',' << metric << ',' << format_double(v) << '\n';
  }

  const ExperimentConfig& config_;
  const sim::Model& model_;
  std::vector<ParamVector> reference_;
  std::ostringstream rows_;
};

nlohmann::ordered_json base_manifest(const ExperimentConfig& c, const sim::Model& m) {
  nlohmann::ordered_json j;
  j["tool"] = "snl";
  j["version"] = kVersion;
  j["build"] = build_info();
  j["status"] = "running";
  j["model"] = m.name;
  j["prior"] = m.prior_name;
  j["method"] = c.method;
  j["seed"] = c.seed;
  j["seeds"] = {{"run", c.seed}, {"pilot", sim::kPilotSeed}, {"observation", sim::kObservationSeed}};
  j["config"] = c.to_json();
  j["true_theta"] = to_std(m.true_theta);
  j["observed"] = to_std(m.observed);
  return j;
}

void finish(nlohmann::ordered_json& manifest, const fs::path& out, RunOutcome& outcome,
            std::vector<std::string> files) {
  manifest["status"] = outcome.ok ? "ok" : "failed";
  if (!outcome.ok) manifest["error"] = outcome.error;
  manifest["simulations"] = {{"simulator_calls", outcome.simulator_calls},
                             {"reported", outcome.reported_simulations}};
  std::erase_if(files, [&](const std::string& f) { return f != "manifest.json" && !fs::exists(out / f); });
  std::sort(files.begin(), files.end());
  manifest["files"] = files;
  write_json(out / "manifest.json", manifest);
}

}  // namespace

nlohmann::ordered_json build_info() {
  return {{"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION}};
}

std::vector<ParamVector> toy_reference_posterior(const sim::Model& model, int n, std::uint64_t seed) {
  const mcmc::LogTarget exact = [&model](const ParamVector& t) {
    const double lp = model.prior.log_density(t);
    return lp == kNegInf ? kNegInf : lp + sim::toy_log_likelihood(model.observed, t);
  };
  Rng start(derive_seed(seed, 1));
  mcmc::ChainState chain(model.prior.sample(start), model.prior.upper() - model.prior.lower(), derive_seed(seed, 2));
  return mcmc::run_chain(chain, exact, n, 500, 10);
}

std::vector<ParamVector> infer(const ExperimentConfig& config, const sim::Model& model, const sim::Simulator& simulator,
                               const DataVector& x, int n, int thin, std::uint64_t seed) {
  ExperimentConfig c = config;
  c.seed = seed;
  c.jobs = 1;
  if (c.method == "snl" || c.method == "nl") {
    const auto r = engine::run_snl(model.prior, simulator, x, engine_config(c));
    return r.posterior.sample(n, derive_seed(seed, kInference), c.burn_in, thin);
  }
  if (c.method == "sl") {
    auto s = sl_config(c);
    s.n_samples = n;
    s.thin = thin;
    return baselines::run_sl_mcmc(model.prior, simulator, x, s).samples;
  }
  const auto r = baselines::run_smc_abc(model.prior, simulator, x, smc_config(c));
  return resample(r.populations.back(), n, derive_seed(seed, kInference));
}

RunOutcome run_experiment(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  const sim::Model model = sim::make_model(config.model, config.prior);
  fs::create_directories(out);
  fs::remove(out / "error.json");
  auto counter = std::make_shared<sim::CountingSimulator>(model.simulator);
  nlohmann::ordered_json manifest = base_manifest(config, model);
  Evaluator metrics(config, model);
  RunOutcome outcome;
  std::vector<std::string> files{"manifest.json", "metrics.csv", "posterior_samples.csv"};
  std::vector<ParamVector> final_draws;
  // Instrumented call count after each round, next to what the curves report.
  std::vector<std::uint64_t> counter_by_round;

  try {
    if (config.method == "snl" || config.method == "nl") {
      files.insert(files.end(), {"rounds.csv", "store.jsonl"});
      std::ostringstream rounds;
      rounds << "round,sims,median_dist,val_loss,seconds\n";
      const auto on_round = [&](const engine::RoundReport& rep) {
        const std::string flow_file = "flows/round_" + std::to_string(rep.round) + ".json";
        fs::create_directories(out / "flows");
        flow::save_flow(*rep.flow, out / flow_file);
        files.push_back(flow_file);
        rounds << rep.round << ',' << rep.simulator_calls << ',' << format_double(rep.median_distance) << ','
               << format_double(rep.validation_loss) << ',' << format_double(rep.seconds) << '\n';
        write_text(out / "rounds.csv", rounds.str());
        const engine::PosteriorApprox post(rep.flow, model.prior, model.observed);
        final_draws = post.sample(config.posterior_samples,
                                  derive_seed(config.seed, kPosterior, static_cast<std::uint64_t>(rep.round)),
                                  config.burn_in);
        metrics.add(rep.round, rep.simulator_calls, final_draws);
        metrics.add_value(rep.round, rep.simulator_calls, "median_distance", rep.median_distance);
        outcome.reported_simulations = rep.simulator_calls;
        counter_by_round.push_back(counter->calls());
      };
      const auto result = engine::run_snl(model.prior, *counter, model.observed, engine_config(config), on_round);
      std::ostringstream store;
      result.store.write_jsonl(store);
      write_text(out / "store.jsonl", store.str());
      outcome.reported_simulations = result.simulator_calls;
    } else if (config.method == "sl") {
      files.push_back("chain.json");
      const auto result = baselines::run_sl_mcmc(model.prior, *counter, model.observed, sl_config(config));
      outcome.reported_simulations = result.simulator_calls;
      final_draws = result.samples;
      counter_by_round.push_back(counter->calls());
      metrics.add(1, result.simulator_calls, final_draws);
      write_json(out / "chain.json", {{"likelihood_estimates", result.likelihood_estimates},
                                      {"simulator_calls", result.simulator_calls},
                                      {"target_evaluations", result.chain.target_evaluations},
                                      {"sweeps", result.chain.sweeps},
                                      {"stalled_updates", result.chain.stalled_updates}});
    } else {
      files.push_back("populations.jsonl");
      std::ostringstream pops;
      const auto on_round = [&](const baselines::ParticlePopulation& p) {
        pops << population_json(p).dump() << '\n';
        write_text(out / "populations.jsonl", pops.str());
        final_draws = resample(p, config.posterior_samples,
                               derive_seed(config.seed, kResample, static_cast<std::uint64_t>(p.round)));
        metrics.add(p.round, p.simulations, final_draws);
        metrics.add_value(p.round, p.simulations, "epsilon", p.epsilon);
        outcome.reported_simulations = p.simulations;
        counter_by_round.push_back(counter->calls());
      };
      const auto result = baselines::run_smc_abc(model.prior, *counter, model.observed, smc_config(config), on_round);
      outcome.reported_simulations = result.simulator_calls;
      manifest["smc_abc"] = {{"initial_epsilon", result.initial_epsilon},
                             {"pilot_acceptance", result.pilot_acceptance},
                             {"stop_reason", result.stop_reason}};
    }
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
    files.push_back("error.json");
    write_json(out / "error.json", {{"method", config.method}, {"message", e.what()}});
  }

  outcome.simulator_calls = counter->calls();
  manifest["counter_by_round"] = counter_by_round;
  write_text(out / "metrics.csv", metrics.csv());
  write_samples_csv(out / "posterior_samples.csv", final_draws);
  finish(manifest, out, outcome, files);
  return outcome;
}

RunOutcome simulate_prior_predictive(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  const sim::Model model = sim::make_model(config.model, config.prior);
  fs::create_directories(out);
  auto counter = std::make_shared<sim::CountingSimulator>(model.simulator);
  Rng rng(derive_seed(config.seed, kPrior));
  const auto thetas = model.prior.sample(config.simulate_n, rng);
  const auto xs = sim::simulate_batch(*counter, thetas, derive_seed(config.seed, kPrior, 1), 0, config.jobs);
  flow::SimulationStore store;
  std::uint64_t failed = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (xs[i])
      store.add(0, thetas[i], *xs[i]);
    else
      ++failed;
  }
  std::ostringstream os;
  store.write_jsonl(os);
  write_text(out / "store.jsonl", os.str());

  nlohmann::ordered_json obs;
  obs["model"] = model.name;
  obs["prior"] = model.prior.to_json();
  obs["true_theta"] = to_std(model.true_theta);
  obs["observed"] = to_std(model.observed);
  obs["observed_raw"] = to_std(model.observed_raw);
  if (model.whitening) obs["whitening"] = model.whitening->to_json();
  write_json(out / "observed.json", obs);

  nlohmann::ordered_json manifest = base_manifest(config, model);
  manifest["method"] = "simulate";
  manifest["failed_simulations"] = failed;
  RunOutcome outcome;
  outcome.simulator_calls = counter->calls();
  outcome.reported_simulations = thetas.size();
  finish(manifest, out, outcome, {"manifest.json", "observed.json", "store.jsonl"});
  return outcome;
}

}  // namespace snl::cli
