// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,3,...] [--known-red 4,...] [--seeds N] [--jobs N]
//
// Exit status is 0 when every criterion passes or fails only among those
// listed with --known-red; the verdict lines are printed unchanged either way.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "artifacts.hpp"
#include "config.hpp"
#include "diagnose.hpp"
#include "experiment.hpp"
#include "snl/baselines/smc_abc.hpp"
#include "snl/baselines/synthetic_likelihood.hpp"
#include "snl/diagnostics/gof.hpp"
#include "snl/diagnostics/metrics.hpp"
#include "snl/diagnostics/sbc.hpp"
#include "snl/engine/snl.hpp"
#include "snl/flow/train.hpp"
#include "snl/mcmc/slice_sampler.hpp"
#include "snl/sim/registry.hpp"
#include "snl/sim/toy.hpp"
#include "test_support.hpp"
#include "toy_reference.hpp"

using namespace snl;
namespace fs = std::filesystem;

namespace {

struct Options {
  int seeds = 5;
  int jobs = 1;
};

struct Verdict {
  bool pass = false;
  std::string summary;
};

class Clock {
 public:
  Clock() : wall_(std::chrono::steady_clock::now()), cpu_(std::clock()) {}
  double wall() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_).count(); }
  double cpu() const { return static_cast<double>(std::clock() - cpu_) / CLOCKS_PER_SEC; }

 private:
  std::chrono::steady_clock::time_point wall_;
  std::clock_t cpu_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

void detail(const std::string& line) { std::cout << "    " << line << std::endl; }

// ---------------------------------------------------------------- 1

flow::FlowConfig flow_config(int d, int c, int layers, std::vector<int> hidden) {
  flow::FlowConfig cfg;
  cfg.data_dim = d;
  cfg.cond_dim = c;
  cfg.n_layers = layers;
  cfg.hidden_sizes = std::move(hidden);
  return cfg;
}

Verdict flow_correctness(const Options&) {
  const Clock clock;
  Rng rng(2024);

  // Gradients against central differences at 100 random (flow, entry) points.
  double worst_grad = 0.0;
  int points = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const int d = 2 + trial % 2;
    flow::ConditionalMaf f(flow_config(d, 2, 3, {5, 5}), 100 + static_cast<std::uint64_t>(trial));
    test::randomize(f, rng, 0.4);
    const Matrix x = Matrix::Random(d, 7);
    const Matrix theta = Matrix::Random(2, 7);
    const flow::Mode mode = trial % 2 == 0 ? flow::Mode::train : flow::Mode::eval;
    std::vector<Matrix> grads;
    f.loss_and_gradient(x, theta, mode, grads, false);
    auto params = f.parameters();
    auto masks = f.gradient_masks();
    for (int picked = 0; picked < 25;) {
      const auto block = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(params.size()));
      const auto entry = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(params[block]->size()));
      if (masks[block] && masks[block]->data()[entry] == 0.0) continue;
      double& w = params[block]->data()[entry];
      const double saved = w, h = 1e-5;
      w = saved + h;
      const double up = -f.log_prob(x, theta, mode).mean();
      w = saved - h;
      const double down = -f.log_prob(x, theta, mode).mean();
      w = saved;
      worst_grad = std::max(worst_grad, test::relative_error(grads[block].data()[entry], (up - down) / (2 * h)));
      ++picked;
      ++points;
    }
  }

  // Density and generative directions invert each other.
  flow::ConditionalMaf inv(flow_config(4, 3, 5, {20, 20}), 12);
  test::randomize(inv, rng, 0.3);
  const Matrix theta = Matrix::Random(3, 500);
  const Matrix x = Matrix::Random(4, 500) * 2.0;
  const double round_trip = (inv.from_base(inv.to_base(x, theta), theta) - x).cwiseAbs().maxCoeff();

  // Identity at initialization: log density equals the standard normal.
  flow::ConditionalMaf fresh(flow_config(8, 5, 5, {50, 50}), 3);
  double identity = 0.0;
  for (int t = 0; t < 100; ++t) {
    const DataVector z = standard_normal_vector(8, rng) * 2.0;
    const double analytic = -0.5 * z.squaredNorm() - 4.0 * kLog2Pi;
    identity = std::max(identity, std::abs(fresh.log_prob(z, ParamVector::Random(5)) - analytic));
  }

  // 1-D normalization by trapezoidal quadrature.
  flow::ConditionalMaf one(flow_config(1, 1, 5, {20, 20}), 4);
  test::randomize(one, rng, 0.3);
  const double lo = -60.0, hi = 60.0;
  const int n = 120001;
  const double step = (hi - lo) / (n - 1);
  Matrix grid(1, n);
  for (int k = 0; k < n; ++k) grid(0, k) = lo + step * k;
  const Vector lp = one.log_prob_batch(grid, ParamVector::Constant(1, 0.4));
  double integral = 0.0;
  for (int k = 0; k < n; ++k) integral += (k == 0 || k == n - 1 ? 0.5 : 1.0) * std::exp(lp(k));
  integral *= step;

  const double secs = clock.cpu();
  const bool pass = points == 100 && worst_grad < 1e-4 && round_trip < 1e-8 && identity < 1e-12 &&
                    std::abs(integral - 1.0) < 1e-3 && secs < 60.0;
  return {pass, "gradient rel err " + fmt(worst_grad) + " (<1e-4, " + std::to_string(points) + " points), round trip " +
                    fmt(round_trip) + " (<1e-8), identity " + fmt(identity) + " (<1e-12), integral " +
                    fmt(integral, 8) + " (|1-I|<1e-3), " + fmt(secs, 3) + " s CPU (<60)"};
}

// ---------------------------------------------------------------- 2

Verdict density_recovery(const Options&) {
  const Clock clock;
  Rng rng(7);
  flow::SimulationStore store;
  for (int i = 0; i < 2000; ++i) {
    const ParamVector theta = ParamVector::Constant(1, 2.0 * uniform01(rng) - 1.0);
    store.add(1, theta, (theta.array() + standard_normal(rng)).matrix());
  }
  flow::ConditionalMaf f(flow_config(1, 1, 5, {50, 50}), 1);
  flow::TrainConfig cfg;
  cfg.seed = 3;
  const auto result = flow::train(store, cfg, f);

  bool ok = true;
  std::ostringstream os;
  for (double probe : {-0.5, 0.0, 0.5}) {
    const double lo = -12.0, hi = 12.0;
    const int n = 24001;
    const double step = (hi - lo) / (n - 1);
    Matrix grid(1, n);
    for (int k = 0; k < n; ++k) grid(0, k) = lo + step * k;
    const Vector lp = f.log_prob_batch(grid, ParamVector::Constant(1, probe));
    double z = 0, m1 = 0, m2 = 0;
    for (int k = 0; k < n; ++k) {
      const double p = std::exp(lp(k));
      z += p;
      m1 += p * grid(0, k);
      m2 += p * grid(0, k) * grid(0, k);
    }
    const double mean = m1 / z, sd = std::sqrt(m2 / z - mean * mean);
    ok = ok && std::abs(mean - probe) < 0.1 && sd >= 0.85 && sd <= 1.15;
    os << "theta " << probe << ": mean " << fmt(mean) << " sd " << fmt(sd) << "; ";
  }
  const double secs = clock.cpu();
  os << result.epochs << " epochs, " << fmt(secs, 3) << " s CPU (<300)";
  return {ok && secs < 300.0, os.str()};
}

// ---------------------------------------------------------------- 3, 5

struct ToyRun {
  double prior_mmd = 0, snl_mmd = 0, nl_mmd = 0;
  std::vector<double> median_distance;
};

std::vector<ToyRun> toy_runs;
double toy_cpu = 0.0;

void run_toy(const Options& o) {
  if (!toy_runs.empty()) return;
  const Clock clock;
  const sim::Model toy = sim::make_model("toy");
  for (int s = 1; s <= o.seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    ToyRun run;
    const auto reference = test::toy_reference_posterior(toy, 1000, derive_seed(seed, 1));
    Rng prior_rng(derive_seed(seed, 2));
    run.prior_mmd = diagnostics::mmd(toy.prior.sample(1000, prior_rng), reference);

    engine::SnlConfig cfg;
    cfg.rounds = 5;
    cfg.sims_per_round = 1000;
    cfg.seed = seed;
    cfg.jobs = o.jobs;
    const auto snl = engine::run_snl(toy.prior, *toy.simulator, toy.observed, cfg);
    for (const auto& r : snl.rounds) run.median_distance.push_back(r.median_distance);
    run.snl_mmd = diagnostics::mmd(snl.posterior.sample(1000, derive_seed(seed, 3), 200, 10), reference);

    const auto nl = engine::run_nl(toy.prior, *toy.simulator, toy.observed, 5000, cfg);
    run.nl_mmd = diagnostics::mmd(nl.posterior.sample(1000, derive_seed(seed, 4), 200, 10), reference);

    std::ostringstream med;
    for (double d : run.median_distance) med << ' ' << fmt(d);
    detail("seed " + std::to_string(s) + ": prior " + fmt(run.prior_mmd) + " snl " + fmt(run.snl_mmd) + " nl(5000) " +
           fmt(run.nl_mmd) + "; median distance by round" + med.str());
    toy_runs.push_back(run);
  }
  toy_cpu = clock.cpu();
}

Verdict toy_end_to_end(const Options& o) {
  run_toy(o);
  int wins = 0;
  for (const auto& r : toy_runs) wins += (r.snl_mmd < 0.5 * r.prior_mmd && r.snl_mmd < r.nl_mmd) ? 1 : 0;
  const int need = o.seeds - 1;
  const bool pass = wins >= need && toy_cpu < 1800.0;
  return {pass, std::to_string(wins) + "/" + std::to_string(o.seeds) + " seeds with MMD(snl) < 0.5 MMD(prior) and < MMD(nl 5000) (need " +
                    std::to_string(need) + "), " + fmt(toy_cpu, 4) + " s CPU (<1800)"};
}

Verdict median_distance(const Options& o) {
  run_toy(o);
  int good_seeds = 0;
  std::ostringstream os;
  for (const auto& r : toy_runs) {
    int ok = 0;
    for (std::size_t k = 1; k < r.median_distance.size(); ++k) ok += r.median_distance[k] <= r.median_distance[k - 1];
    good_seeds += ok >= 3;
    os << ok << "/4 ";
  }
  return {2 * good_seeds > o.seeds,
          "non-increasing transitions per seed: " + os.str() + "; " + std::to_string(good_seeds) + "/" +
              std::to_string(o.seeds) + " seeds with >= 3 (need a majority)"};
}

// ---------------------------------------------------------------- 4, 7

struct QueueRun {
  std::vector<double> nlp;
  std::vector<double> gof;
  double untrained_gof = 0.0;
  int inside = 0, total = 0;
};

std::vector<QueueRun> queue_runs;

void run_queue(const Options& o) {
  if (!queue_runs.empty()) return;
  const sim::Model mg1 = sim::make_model("mg1");
  const double edge = mg1.observed_raw(0);
  for (int s = 1; s <= o.seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    QueueRun run;
    engine::SnlConfig cfg;
    cfg.rounds = 5;
    cfg.sims_per_round = 1000;
    cfg.seed = seed;
    cfg.jobs = o.jobs;
    const std::uint64_t gof_seed = derive_seed(seed, 5);
    const auto result = engine::run_snl(mg1.prior, *mg1.simulator, mg1.observed, cfg, [&](const engine::RoundReport& r) {
      const engine::PosteriorApprox post(r.flow, mg1.prior, mg1.observed);
      const auto draws = post.sample(1000, derive_seed(seed, 6, static_cast<std::uint64_t>(r.round)), 200);
      run.nlp.push_back(-diagnostics::kde_log_prob(std::vector<Vector>(draws.begin(), draws.end()), mg1.true_theta));
      run.gof.push_back(diagnostics::likelihood_gof(*r.flow, *mg1.simulator, mg1.true_theta, 1000, gof_seed, o.jobs));
      if (r.round == cfg.rounds)
        for (const auto& t : draws) {
          run.inside += t(0) <= edge;
          ++run.total;
        }
    });
    auto untrained_cfg = result.posterior.flow().config();
    const flow::ConditionalMaf untrained(untrained_cfg, derive_seed(seed, 7));
    run.untrained_gof = diagnostics::likelihood_gof(untrained, *mg1.simulator, mg1.true_theta, 1000, gof_seed, o.jobs);

    std::ostringstream os;
    os << "seed " << s << ": constraint " << fmt(static_cast<double>(run.inside) / run.total) << "; kde nlp";
    for (double v : run.nlp) os << ' ' << fmt(v);
    os << "; gof";
    for (double v : run.gof) os << ' ' << fmt(v);
    os << " (untrained " << fmt(run.untrained_gof) << ")";
    detail(os.str());
    queue_runs.push_back(run);
  }
}

Verdict queue_constraint(const Options& o) {
  run_queue(o);
  int inside = 0, total = 0, decreasing = 0;
  for (const auto& r : queue_runs) {
    inside += r.inside;
    total += r.total;
    decreasing += r.nlp.back() < r.nlp.front();
  }
  const double frac = static_cast<double>(inside) / total;
  const int need = o.seeds - 1;
  return {frac >= 0.99 && decreasing >= need,
          "theta1 <= observed minimum gap in " + fmt(100.0 * frac) + "% of final-round samples (need >= 99%); KDE NLP " +
              "lower at round 5 than round 1 in " + std::to_string(decreasing) + "/" + std::to_string(o.seeds) +
              " seeds (need " + std::to_string(need) + ")"};
}

Verdict queue_gof(const Options& o) {
  run_queue(o);
  int good = 0;
  for (const auto& r : queue_runs) good += r.gof.back() < r.gof.front() && r.gof.back() < r.untrained_gof;
  return {2 * good > o.seeds, std::to_string(good) + "/" + std::to_string(o.seeds) +
                                  " seeds with gof(round 5) < gof(round 1) and < untrained (need a majority)"};
}

// ---------------------------------------------------------------- 6

Verdict calibration(const Options& o) {
  const Clock clock;
  const sim::Model toy = sim::make_model("toy");
  const int trials = 100, draws = 9, thin = 50;

  const diagnostics::InferenceProcedure snl = [&](const DataVector& x, std::uint64_t seed) {
    engine::SnlConfig cfg;
    cfg.rounds = 3;
    cfg.sims_per_round = 300;
    cfg.seed = seed;
    const auto r = engine::run_snl(toy.prior, *toy.simulator, x, cfg);
    return r.posterior.sample(draws, derive_seed(seed, 1), 200, thin);
  };
  const diagnostics::InferenceProcedure exact = [&](const DataVector& x, std::uint64_t seed) {
    const mcmc::LogTarget target = [&](const ParamVector& t) {
      const double lp = toy.prior.log_density(t);
      return lp == kNegInf ? kNegInf : lp + sim::toy_log_likelihood(x, t);
    };
    Rng start(derive_seed(seed, 1));
    mcmc::ChainState chain(toy.prior.sample(start), toy.prior.upper() - toy.prior.lower(), derive_seed(seed, 2));
    return mcmc::run_chain(chain, target, draws, 500, thin);
  };

  const auto oracle = diagnostics::sbc_ranks(toy.prior, *toy.simulator, exact, trials, draws, 11, o.jobs);
  const double oracle_secs = clock.cpu();
  const auto learned = diagnostics::sbc_ranks(toy.prior, *toy.simulator, snl, trials, draws, 12, o.jobs);
  const double snl_secs = clock.cpu() - oracle_secs;

  auto list = [](const std::vector<double>& p) {
    std::ostringstream os;
    for (double v : p) os << ' ' << fmt(v, 3);
    return os.str();
  };
  const double snl_min = *std::min_element(learned.p_values.begin(), learned.p_values.end());
  const double oracle_min = *std::min_element(oracle.p_values.begin(), oracle.p_values.end());
  detail("snl p-values" + list(learned.p_values) + " (" + std::to_string(learned.skipped) + " skipped, " +
         fmt(snl_secs, 4) + " s CPU); exact sampler p-values" + list(oracle.p_values) + " (" + fmt(oracle_secs, 3) +
         " s CPU)");
  return {snl_min > 0.005 && oracle_min > 0.01 && learned.skipped == 0,
          "min chi-square p: snl " + fmt(snl_min, 3) + " (need > 0.005), exact sampler " + fmt(oracle_min, 3) +
              " (need > 0.01), 100 trials, 9 draws"};
}

// ---------------------------------------------------------------- 8

// x ~ N(theta, I)
std::shared_ptr<const sim::Simulator> unit_gaussian(int d) {
  return std::make_shared<sim::FunctionSimulator>(d, d, [d](const ParamVector& t, Rng& rng) {
    return std::optional<DataVector>(t + standard_normal_vector(d, rng));
  });
}

double batch_means_se(const std::vector<ParamVector>& s, int axis, int batches = 20) {
  const std::size_t per = s.size() / static_cast<std::size_t>(batches);
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < per; ++i) acc += s[static_cast<std::size_t>(b) * per + i](axis);
    means.push_back(acc / static_cast<double>(per));
  }
  double mu = 0.0;
  for (double m : means) mu += m / batches;
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu) / (batches - 1);
  return std::sqrt(var / batches);
}

Verdict baselines_sanity(const Options& o) {
  // SMC-ABC on the toy model.
  const sim::Model toy = sim::make_model("toy");
  baselines::SmcAbcConfig smc;
  smc.max_rounds = 6;
  smc.seed = 21;
  smc.jobs = o.jobs;
  const auto r = baselines::run_smc_abc(toy.prior, *toy.simulator, toy.observed, smc);
  bool schedule = true;
  double eps = r.initial_epsilon;
  for (std::size_t t = 0; t < r.populations.size(); ++t) {
    const double closed = std::pow(0.9, static_cast<double>(t)) * r.initial_epsilon;
    schedule = schedule && r.populations[t].epsilon == eps &&
               std::abs(r.populations[t].epsilon - closed) <= 1e-14 * closed;
    eps *= 0.9;
  }

  // SL on the conjugate Gaussian: theta ~ N(0, I), x ~ N(theta, I), posterior mean x_o / 2.
  const sim::Prior prior =
      sim::Prior::gaussian_times_box(Vector::Zero(2), 1.0, Vector::Constant(2, -8.0), Vector::Constant(2, 8.0));
  const DataVector xo = (DataVector(2) << 1.2, -0.6).finished();
  baselines::SlConfig sl;
  sl.sims_per_estimate = 100;
  sl.n_samples = 1000;
  sl.seed = 22;
  const auto slr = baselines::run_sl_mcmc(prior, *unit_gaussian(2), xo, sl);
  bool within = true;
  std::ostringstream os;
  for (int axis = 0; axis < 2; ++axis) {
    double mean = 0.0;
    for (const auto& s : slr.samples) mean += s(axis) / static_cast<double>(slr.samples.size());
    const double se = batch_means_se(slr.samples, axis);
    const double z = std::abs(mean - xo(axis) / 2.0) / se;
    within = within && z < 3.0;
    os << " axis " << axis + 1 << ": " << fmt(mean) << " vs " << xo(axis) / 2.0 << " (" << fmt(z, 3) << " SE)";
  }
  return {schedule && r.pilot_acceptance >= 0.2 && within,
          std::string("smc epsilon = 0.9^t eps0 over ") + std::to_string(r.populations.size()) + " rounds: " +
              (schedule ? "exact" : "violated") + "; pilot acceptance " + fmt(r.pilot_acceptance) +
              " (>= 0.2); sl conjugate mean" + os.str() + " (< 3 SE)"};
}

// ---------------------------------------------------------------- 9

Verdict cost_accounting(const Options&) {
  const fs::path root = fs::temp_directory_path() / ("snl_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<fs::path> dirs;
  std::map<std::string, std::vector<std::uint64_t>> counters;
  bool ok = true;
  for (const std::string method : {"snl", "nl", "sl", "smc_abc"}) {
    cli::ExperimentConfig c;
    c.method = method;
    c.seed = 5;
    c.rounds = 3;
    c.sims_per_round = 200;
    c.nl_sims = 400;
    c.sl_sims_per_estimate = 20;
    c.sl_samples = 50;
    c.smc_particles = 100;
    c.smc_max_rounds = 3;
    c.posterior_samples = 200;
    c.burn_in = 50;
    const fs::path out = root / method;
    const auto outcome = cli::run_experiment(c, out);
    ok = ok && outcome.ok && outcome.reported_simulations == outcome.simulator_calls;
    const auto manifest = cli::read_json(out / "manifest.json");
    counters[method] = manifest.at("counter_by_round").get<std::vector<std::uint64_t>>();
    ok = ok && manifest["simulations"]["simulator_calls"] == outcome.simulator_calls;
    dirs.push_back(out);
  }
  std::vector<std::string> warnings;
  cli::emit_curves(dirs, root / "curves", warnings);

  // Every row of every curve names a count the counter actually hit, and each
  // counter snapshot appears in the curves.
  std::map<std::string, std::set<std::uint64_t>> seen;
  int rows = 0;
  for (const auto& entry : fs::directory_iterator(root / "curves")) {
    if (entry.path().filename().string().find("_sbc") != std::string::npos) continue;
    const auto table = cli::read_csv(entry.path());
    const int method = table.column("method"), sims = table.column("simulations");
    for (const auto& row : table.rows) {
      const std::string m = row.at(static_cast<std::size_t>(method));
      const std::uint64_t n = std::stoull(row.at(static_cast<std::size_t>(sims)));
      const auto& c = counters[m];
      ok = ok && std::find(c.begin(), c.end(), n) != c.end();
      seen[m].insert(n);
      ++rows;
    }
  }
  std::ostringstream os;
  for (const auto& [m, c] : counters) {
    ok = ok && seen[m] == std::set<std::uint64_t>(c.begin(), c.end());
    os << ' ' << m << " " << c.back();
  }
  fs::remove_all(root);
  return {ok, std::to_string(rows) + " curve rows checked against counter snapshots; final counts" + os.str()};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Options options;
  std::string only, known_red;
  app.add_option("--only", only, "Comma-separated criteria to run");
  app.add_option("--known-red", known_red, "Criteria whose failure does not fail the run");
  app.add_option("--seeds", options.seeds, "Seeds for multi-seed criteria")->check(CLI::PositiveNumber);
  app.add_option("--jobs", options.jobs, "Worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<int, std::function<Verdict(const Options&)>>> criteria{
      {1, flow_correctness}, {2, density_recovery}, {3, toy_end_to_end},   {4, queue_constraint}, {5, median_distance},
      {6, calibration},      {7, queue_gof},        {8, baselines_sanity}, {9, cost_accounting}};
  const std::set<int> selected = parse_list(only);
  const std::set<int> tolerated = parse_list(known_red);

  std::vector<int> failed;
  for (const auto& [id, check] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const Clock clock;
    Verdict v;
    try {
      v = check(options);
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.summary << "  ["
              << fmt(clock.wall(), 4) << " s]" << std::endl;
    if (!v.pass) failed.push_back(id);
  }

  int unexpected = 0;
  for (int id : failed) {
    if (tolerated.count(id))
      std::cout << "criterion " << id << " is a known failure (see README)" << std::endl;
    else
      ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
