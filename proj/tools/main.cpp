#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "config.hpp"
#include "diagnose.hpp"
#include "experiment.hpp"
#include "snl/sim/registry.hpp"

namespace fs = std::filesystem;
using namespace snl::cli;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "Experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "Overrides the config seed");
  cmd->add_option("--out", c.out, "Output directory (overrides the config)");
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig config = ExperimentConfig::load(c.config);
  if (c.seed) config.seed = *c.seed;
  if (c.jobs) config.jobs = *c.jobs;
  if (!c.out.empty()) config.out = c.out;
  if (config.out.empty()) throw ConfigError("no output directory: set \"out\" in the config or pass --out");
  config.validate();
  return config;
}

int report(const RunOutcome& outcome, const fs::path& out) {
  if (outcome.ok) {
    std::cout << "wrote " << out.string() << " (" << outcome.simulator_calls << " simulator calls)\n";
    return 0;
  }
  std::cerr << "error: " << outcome.error << " (partial artifacts in " << out.string() << ")\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential neural likelihood experiments"};
  app.require_subcommand(1);

  Common sim_opts, run_opts;
  auto* simulate = app.add_subcommand("simulate", "Draw prior-predictive pairs for a model");
  add_common(simulate, sim_opts, true);
  auto* run = app.add_subcommand("run", "Run one inference experiment");
  add_common(run, run_opts, true);

  std::string run_dir;
  DiagnoseOptions diag;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Goodness of fit and calibration for a finished run");
  diagnose_cmd->add_option("--out", run_dir, "Run directory")->required();
  diagnose_cmd->add_option("--jobs", diag.jobs, "Worker threads")->check(CLI::PositiveNumber);
  diagnose_cmd->add_option("--gof-n", diag.gof_n, "Draws per goodness-of-fit estimate")->check(CLI::PositiveNumber);
  diagnose_cmd->add_option("--sbc-trials", diag.sbc_trials, "Calibration trials (0 skips)")->check(CLI::NonNegativeNumber);
  diagnose_cmd->add_option("--sbc-samples", diag.sbc_samples, "Posterior draws per trial")->check(CLI::PositiveNumber);
  diagnose_cmd->add_option("--sbc-thin", diag.sbc_thin, "Sweeps between calibration draws")->check(CLI::PositiveNumber);

  std::vector<std::string> runs;
  std::string curves_out;
  auto* curves = app.add_subcommand("curves", "Collect run metrics into per-model CSV curves");
  curves->add_option("runs", runs, "Run directories")->required();
  curves->add_option("--out", curves_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      const auto config = resolve(sim_opts);
      return report(simulate_prior_predictive(config, config.out), config.out);
    }
    if (*run) {
      const auto config = resolve(run_opts);
      return report(run_experiment(config, config.out), config.out);
    }
    if (*diagnose_cmd) {
      for (const auto& f : diagnose(run_dir, diag)) std::cout << "wrote " << (fs::path(run_dir) / f).string() << '\n';
      return 0;
    }
    if (*curves) {
      std::vector<fs::path> dirs(runs.begin(), runs.end());
      std::vector<std::string> warnings;
      const auto files = emit_curves(dirs, curves_out, warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : files) std::cout << "wrote " << (fs::path(curves_out) / f).string() << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const snl::sim::UnknownModel& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
