#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "artifacts.hpp"
#include "config.hpp"
#include "diagnose.hpp"
#include "experiment.hpp"

using namespace snl;
using namespace snl::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("snl_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ExperimentConfig small(const std::string& method, std::uint64_t seed = 3) {
  ExperimentConfig c;
  c.method = method;
  c.seed = seed;
  c.rounds = 2;
  c.sims_per_round = 100;
  c.nl_sims = 100;
  c.flow_layers = 2;
  c.flow_hidden = 10;
  c.flow_max_epochs = 5;
  c.flow_learning_rate = 1e-3;
  c.posterior_samples = 100;
  c.burn_in = 20;
  c.sl_sims_per_estimate = 20;
  c.sl_samples = 30;
  c.smc_particles = 50;
  c.smc_max_rounds = 2;
  return c;
}

int run_tool(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string(SNL_TOOL_PATH) + " " + args + " 2> " + stderr_file.string() + " > /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("run_experiment: snl on toy, two rounds of 100, records exactly 200 simulator calls") {
  const fs::path out = scratch("snl");
  const RunOutcome r = run_experiment(small("snl"), out);
  REQUIRE(r.ok);
  CHECK(r.simulator_calls == 200);
  const auto manifest = read_json(out / "manifest.json");
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["simulations"]["simulator_calls"] == 200);
  CHECK(manifest["simulations"]["reported"] == 200);
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["config"]["snl"]["rounds"] == 2);
  for (const auto& f : manifest["files"]) CHECK(fs::exists(out / f.get<std::string>()));
  CHECK(lines(out / "store.jsonl").size() == 200);
  CHECK(lines(out / "rounds.csv").front() == "round,sims,median_dist,val_loss,seconds");
  CHECK(lines(out / "posterior_samples.csv").size() == 101);
  CHECK(lines(out / "posterior_samples.csv").front() == "theta_1,theta_2,theta_3,theta_4,theta_5");
  CHECK(fs::exists(out / "flows/round_2.json"));
}

TEST_CASE("run_experiment: rerun with the same config and seed is byte-identical") {
  const fs::path a = scratch("rerun");
  auto c = small("snl", 8);
  REQUIRE(run_experiment(c, a).ok);
  const std::string samples = slurp(a / "posterior_samples.csv");
  const std::string metrics = slurp(a / "metrics.csv");
  const std::string store = slurp(a / "store.jsonl");
  const std::string flow = slurp(a / "flows/round_2.json");
  const std::string manifest = slurp(a / "manifest.json");
  REQUIRE(run_experiment(c, a).ok);
  CHECK(slurp(a / "posterior_samples.csv") == samples);
  CHECK(slurp(a / "metrics.csv") == metrics);
  CHECK(slurp(a / "store.jsonl") == store);
  CHECK(slurp(a / "flows/round_2.json") == flow);
  CHECK(slurp(a / "manifest.json") == manifest);

  c.jobs = 3;
  REQUIRE(run_experiment(c, a).ok);
  CHECK(slurp(a / "posterior_samples.csv") == samples);

  c.seed = 9;
  c.jobs = 1;
  REQUIRE(run_experiment(c, a).ok);
  CHECK(slurp(a / "posterior_samples.csv") != samples);
}

TEST_CASE("run_experiment: every method's manifest count equals the instrumented counter") {
  for (const std::string method : {"nl", "sl", "smc_abc"}) {
    const fs::path out = scratch("m_" + method);
    const RunOutcome r = run_experiment(small(method), out);
    REQUIRE_MESSAGE(r.ok, method << ": " << r.error);
    CHECK(r.simulator_calls > 0);
    CHECK(r.reported_simulations == r.simulator_calls);
    const auto manifest = read_json(out / "manifest.json");
    CHECK(manifest["simulations"]["simulator_calls"] == r.simulator_calls);
  }
}

TEST_CASE("config: round trip, unknown keys, invalid values") {
  auto c = small("smc_abc");
  c.prior = "uniform";
  c.smc_min_epsilon = 0.25;
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  auto j = c.to_json();
  j["snl"]["round"] = 3;
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["colour"] = "red";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  j = c.to_json();
  j["snl"]["rounds"] = "five";
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);

  c = small("snl");
  c.rounds = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small("bayes");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small("snl");
  c.model = "nope";
  CHECK_THROWS_AS(c.validate(), sim::UnknownModel);
  c = small("snl");
  c.prior = "gamma";
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("snl tool: exit codes and registry message") {
  const fs::path dir = scratch("tool");
  const fs::path err = dir / "stderr.txt";
  write_text(dir / "bad.json", R"({"model": "nope"})");
  CHECK(run_tool("run --config " + (dir / "bad.json").string() + " --out " + (dir / "bad").string(), err) == 2);
  const std::string message = slurp(err);
  for (const auto& name : sim::model_names()) CHECK(message.find(name) != std::string::npos);

  write_text(dir / "typo.json", R"({"modle": "toy"})");
  CHECK(run_tool("run --config " + (dir / "typo.json").string() + " --out " + (dir / "x").string(), err) == 2);
  CHECK(run_tool("run --out " + (dir / "x").string(), err) == 2);
  CHECK(run_tool("frobnicate", err) == 2);
  CHECK(run_tool("run --config " + (dir / "missing.json").string() + " --out x", err) == 2);

  auto c = small("snl", 4);
  c.rounds = 1;
  write_json(dir / "ok.json", c.to_json());
  CHECK(run_tool("run --config " + (dir / "ok.json").string() + " --seed 5 --out " + (dir / "ok").string(), err) == 0);
  const auto manifest = read_json(dir / "ok/manifest.json");
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["simulations"]["simulator_calls"] == 100);

  CHECK(run_tool("simulate --config " + (dir / "ok.json").string() + " --out " + (dir / "sim").string(), err) == 0);
  CHECK(lines(dir / "sim/store.jsonl").size() == 1000);
  CHECK(fs::exists(dir / "sim/observed.json"));
}

TEST_CASE("emit_curves: golden header, NL at 1000 and 10000, SNL cumulative rows") {
  const fs::path root = scratch("curves");
  auto nl = small("nl", 1);
  nl.flow_max_epochs = 1;
  nl.evaluate = false;
  nl.nl_sims = 1000;
  REQUIRE(run_experiment(nl, root / "nl_1000").ok);
  nl.nl_sims = 10000;
  REQUIRE(run_experiment(nl, root / "nl_10000").ok);
  auto snl = small("snl", 1);
  snl.rounds = 5;
  snl.sims_per_round = 1000;
  snl.flow_max_epochs = 1;
  snl.evaluate = false;
  REQUIRE(run_experiment(snl, root / "snl").ok);

  std::vector<std::string> warnings;
  const auto files = emit_curves({root / "nl_1000", root / "nl_10000", root / "snl"}, root / "out", warnings);
  REQUIRE(fs::exists(root / "out/toy_median_distance.csv"));
  const auto rows = lines(root / "out/toy_median_distance.csv");
  CHECK(rows.front() == kCurveHeader);
  CHECK(rows.front() == "method,simulations,value,seed");
  std::vector<std::string> nl_sims, snl_sims;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    const std::string method = rows[i].substr(0, comma);
    const std::string sims = rows[i].substr(comma + 1, rows[i].find(',', comma + 1) - comma - 1);
    (method == "nl" ? nl_sims : snl_sims).push_back(sims);
    CHECK(rows[i].substr(rows[i].rfind(',') + 1) == "1");
  }
  CHECK(nl_sims == std::vector<std::string>{"1000", "10000"});
  CHECK(snl_sims == std::vector<std::string>{"1000", "2000", "3000", "4000", "5000"});

  // A run directory without a manifest is skipped with a warning.
  warnings.clear();
  fs::create_directories(root / "empty");
  emit_curves({root / "empty", root / "snl"}, root / "out2", warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("manifest") != std::string::npos);
}

TEST_CASE("emit_curves: missing metric rows are omitted with a warning") {
  const fs::path root = scratch("missing");
  REQUIRE(run_experiment(small("smc_abc", 2), root / "smc").ok);
  REQUIRE(run_experiment(small("sl", 2), root / "sl").ok);
  std::vector<std::string> warnings;
  emit_curves({root / "smc", root / "sl"}, root / "out", warnings);
  const auto eps = lines(root / "out/toy_epsilon.csv");
  CHECK(eps.front() == kCurveHeader);
  for (std::size_t i = 1; i < eps.size(); ++i) CHECK(eps[i].rfind("smc_abc,", 0) == 0);
  bool warned = false;
  for (const auto& w : warnings) warned = warned || (w.find("epsilon") != std::string::npos && w.find("sl") != std::string::npos);
  CHECK(warned);

  // Non-finite values are dropped too.
  write_text(root / "sl/metrics.csv", "method,round,simulations,metric,value\nsl,1,600,mmd,nan\n");
  warnings.clear();
  emit_curves({root / "sl"}, root / "out3", warnings);
  CHECK(!fs::exists(root / "out3/toy_mmd.csv"));
  CHECK(warnings.size() == 1);
}

TEST_CASE("diagnose: goodness of fit per round and a calibration histogram") {
  const fs::path out = scratch("diag");
  auto c = small("snl", 6);
  REQUIRE(run_experiment(c, out).ok);
  DiagnoseOptions d;
  d.gof_n = 100;
  d.sbc_trials = 6;
  d.sbc_samples = 4;
  d.sbc_thin = 2;
  const auto written = diagnose(out, d);
  CHECK(written == std::vector<std::string>{"gof.csv", "sbc.csv", "sbc_summary.json"});
  const auto gof = lines(out / "gof.csv");
  CHECK(gof.front() == "round,simulations,likelihood_gof,gaussian_gof");
  CHECK(gof.size() == 3);
  CHECK(gof[2].rfind("2,200,", 0) == 0);
  const auto sbc = lines(out / "sbc.csv");
  CHECK(sbc.front() == "parameter,rank,count,band_lower,band_upper");
  CHECK(sbc.size() == 1 + 5 * 5);
  const auto summary = read_json(out / "sbc_summary.json");
  CHECK(summary["trials"] == 6);
  CHECK(summary["p_values"].size() == 5);
  const std::string first = slurp(out / "sbc.csv");
  diagnose(out, d);
  CHECK(slurp(out / "sbc.csv") == first);
}
