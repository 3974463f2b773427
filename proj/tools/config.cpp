#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "snl/sim/registry.hpp"

namespace snl::cli {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

void reject_unknown(const nlohmann::ordered_json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "' in " + where);
}

template <class T>
void read(const nlohmann::ordered_json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

void positive(int v, const char* name) {
  if (v < 1) throw ConfigError(std::string("config: ") + name + " must be >= 1");
}

}  // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"snl", "nl", "sl", "smc_abc"};
  return names;
}

void ExperimentConfig::validate() const {
  const auto& models = sim::model_names();
  if (std::find(models.begin(), models.end(), model) == models.end())
    throw sim::UnknownModel("unknown model '" + model + "'; registered models: " + join(models));
  if (!prior.empty()) {
    const auto priors = sim::prior_names(model);
    if (std::find(priors.begin(), priors.end(), prior) == priors.end())
      throw ConfigError("config: unknown prior '" + prior + "' for model " + model + "; choose from " + join(priors));
  }
  const auto& methods = method_names();
  if (std::find(methods.begin(), methods.end(), method) == methods.end())
    throw ConfigError("config: unknown method '" + method + "'; choose from " + join(methods));
  positive(jobs, "jobs");
  positive(rounds, "snl.rounds");
  if (sims_per_round < 2) throw ConfigError("config: snl.sims_per_round must be >= 2");
  if (nl_sims < 2) throw ConfigError("config: nl.sims must be >= 2");
  positive(sl_sims_per_estimate, "sl.sims_per_estimate");
  positive(sl_samples, "sl.samples");
  if (smc_particles < 2) throw ConfigError("config: smc_abc.particles must be >= 2");
  positive(smc_max_rounds, "smc_abc.max_rounds");
  if (!(smc_min_epsilon >= 0.0)) throw ConfigError("config: smc_abc.min_epsilon must be >= 0");
  positive(flow_layers, "flow.layers");
  positive(flow_hidden, "flow.hidden");
  if (flow_max_epochs < 0) throw ConfigError("config: flow.max_epochs must be >= 0");
  if (!(flow_learning_rate > 0.0)) throw ConfigError("config: flow.learning_rate must be > 0");
  positive(simulate_n, "simulate.n");
  if (posterior_samples < 2) throw ConfigError("config: posterior_samples must be >= 2");
  if (burn_in < 0) throw ConfigError("config: burn_in must be >= 0");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["prior"] = prior;
  j["method"] = method;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["out"] = out;
  j["snl"] = {{"rounds", rounds}, {"sims_per_round", sims_per_round}};
  j["nl"] = {{"sims", nl_sims}};
  j["sl"] = {{"sims_per_estimate", sl_sims_per_estimate}, {"samples", sl_samples}};
  j["smc_abc"] = {{"particles", smc_particles},
                  {"max_rounds", smc_max_rounds},
                  {"simulation_budget", smc_budget},
                  {"min_epsilon", smc_min_epsilon}};
  j["flow"] = {{"layers", flow_layers},
               {"hidden", flow_hidden},
               {"max_epochs", flow_max_epochs},
               {"learning_rate", flow_learning_rate}};
  j["simulate"] = {{"n", simulate_n}};
  j["posterior_samples"] = posterior_samples;
  j["burn_in"] = burn_in;
  j["evaluate"] = evaluate;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::ordered_json& j) {
  reject_unknown(j,
                 {"model", "prior", "method", "seed", "jobs", "out", "snl", "nl", "sl", "smc_abc", "flow", "simulate",
                  "posterior_samples", "burn_in", "evaluate"},
                 "top level");
  ExperimentConfig c;
  read(j, "model", c.model);
  read(j, "prior", c.prior);
  read(j, "method", c.method);
  read(j, "seed", c.seed);
  read(j, "jobs", c.jobs);
  read(j, "out", c.out);
  read(j, "posterior_samples", c.posterior_samples);
  read(j, "burn_in", c.burn_in);
  read(j, "evaluate", c.evaluate);
  if (j.contains("snl")) {
    reject_unknown(j["snl"], {"rounds", "sims_per_round"}, "snl");
    read(j["snl"], "rounds", c.rounds);
    read(j["snl"], "sims_per_round", c.sims_per_round);
  }
  if (j.contains("nl")) {
    reject_unknown(j["nl"], {"sims"}, "nl");
    read(j["nl"], "sims", c.nl_sims);
  }
  if (j.contains("sl")) {
    reject_unknown(j["sl"], {"sims_per_estimate", "samples"}, "sl");
    read(j["sl"], "sims_per_estimate", c.sl_sims_per_estimate);
    read(j["sl"], "samples", c.sl_samples);
  }
  if (j.contains("smc_abc")) {
    reject_unknown(j["smc_abc"], {"particles", "max_rounds", "simulation_budget", "min_epsilon"}, "smc_abc");
    read(j["smc_abc"], "particles", c.smc_particles);
    read(j["smc_abc"], "max_rounds", c.smc_max_rounds);
    read(j["smc_abc"], "simulation_budget", c.smc_budget);
    read(j["smc_abc"], "min_epsilon", c.smc_min_epsilon);
  }
  if (j.contains("flow")) {
    reject_unknown(j["flow"], {"layers", "hidden", "max_epochs", "learning_rate"}, "flow");
    read(j["flow"], "layers", c.flow_layers);
    read(j["flow"], "hidden", c.flow_hidden);
    read(j["flow"], "max_epochs", c.flow_max_epochs);
    read(j["flow"], "learning_rate", c.flow_learning_rate);
  }
  if (j.contains("simulate")) {
    reject_unknown(j["simulate"], {"n"}, "simulate");
    read(j["simulate"], "n", c.simulate_n);
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace snl::cli
