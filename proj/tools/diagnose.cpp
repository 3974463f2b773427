#include "diagnose.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "artifacts.hpp"
#include "config.hpp"
#include "experiment.hpp"
#include "snl/diagnostics/gof.hpp"
#include "snl/diagnostics/sbc.hpp"
#include "snl/flow/serialize.hpp"

namespace snl::cli {

namespace fs = std::filesystem;

namespace {

enum Stream : std::uint64_t { kGof = 201, kSbc };

}  // namespace

std::vector<std::string> diagnose(const fs::path& run, const DiagnoseOptions& options) {
  const auto manifest = read_json(run / "manifest.json");
  const ExperimentConfig config = ExperimentConfig::from_json(manifest.at("config"));
  const sim::Model model = sim::make_model(config.model, config.prior);
  std::vector<std::string> written;

  if (config.method == "snl" || config.method == "nl") {
    const CsvTable rounds = read_csv(run / "rounds.csv");
    const int sims_col = rounds.column("sims");
    const std::uint64_t seed = derive_seed(config.seed, kGof);
    const double gaussian =
        diagnostics::gaussian_gof(*model.simulator, model.true_theta, options.gof_n, seed, options.jobs);
    std::ostringstream os;
    os << "round,simulations,likelihood_gof,gaussian_gof\n";
    for (const auto& row : rounds.rows) {
      const std::string r = row.at(0);
      const auto flow = flow::load_flow(run / ("flows/round_" + r + ".json"));
      const double v = diagnostics::likelihood_gof(flow, *model.simulator, model.true_theta, options.gof_n, seed,
                                                   options.jobs);
      os << r << ',' << row.at(static_cast<std::size_t>(sims_col)) << ',' << format_double(v) << ','
         << format_double(gaussian) << '\n';
    }
    write_text(run / "gof.csv", os.str());
    written.push_back("gof.csv");
  }

  if (options.sbc_trials > 0) {
    const diagnostics::InferenceProcedure inference = [&](const DataVector& x, std::uint64_t seed) {
      return infer(config, model, *model.simulator, x, options.sbc_samples, options.sbc_thin, seed);
    };
    const auto result = diagnostics::sbc_ranks(model.prior, *model.simulator, inference, options.sbc_trials,
                                               options.sbc_samples, derive_seed(config.seed, kSbc), options.jobs);
    std::ostringstream os;
    os << "parameter,rank,count,band_lower,band_upper\n";
    for (std::size_t i = 0; i < result.histograms.size(); ++i)
      for (std::size_t k = 0; k < result.histograms[i].size(); ++k)
        os << i + 1 << ',' << k << ',' << result.histograms[i][k] << ',' << result.band_lower << ','
           << result.band_upper << '\n';
    write_text(run / "sbc.csv", os.str());
    write_json(run / "sbc_summary.json", {{"trials", options.sbc_trials},
                                          {"completed", result.records.size()},
                                          {"skipped", result.skipped},
                                          {"samples", options.sbc_samples},
                                          {"p_values", result.p_values}});
    written.insert(written.end(), {"sbc.csv", "sbc_summary.json"});
  }
  return written;
}

std::vector<std::string> emit_curves(const std::vector<fs::path>& runs, const fs::path& out,
                                     std::vector<std::string>& warnings) {
  // (model, metric) -> rows
  std::map<std::pair<std::string, std::string>, std::ostringstream> curves;
  std::map<std::string, std::ostringstream> sbc;
  std::map<std::string, std::set<std::string>> metrics_of_model;
  std::vector<std::tuple<std::string, std::string, std::set<std::string>>> seen;

  for (const auto& run : runs) {
    if (!fs::exists(run / "manifest.json")) {
      warnings.push_back(run.string() + ": no manifest.json, skipped");
      continue;
    }
    const auto manifest = read_json(run / "manifest.json");
    const std::string model = manifest.at("model");
    const std::string method = manifest.at("method");
    const std::string seed = std::to_string(manifest.at("seed").get<std::uint64_t>());
    std::set<std::string> present;
    auto add = [&](const std::string& metric, const std::string& sims, const std::string& value) {
      const double v = std::stod(value);
      if (!std::isfinite(v)) {
        warnings.push_back(run.string() + ": non-finite " + metric + " at " + sims + " simulations omitted");
        return;
      }
      curves[{model, metric}] << method << ',' << sims << ',' << value << ',' << seed << '\n';
      present.insert(metric);
      metrics_of_model[model].insert(metric);
    };

    if (fs::exists(run / "metrics.csv")) {
      const CsvTable t = read_csv(run / "metrics.csv");
      const int sims = t.column("simulations"), metric = t.column("metric"), value = t.column("value");
      for (const auto& row : t.rows)
        add(row.at(static_cast<std::size_t>(metric)), row.at(static_cast<std::size_t>(sims)),
            row.at(static_cast<std::size_t>(value)));
    } else {
      warnings.push_back(run.string() + ": no metrics.csv");
    }
    if (fs::exists(run / "gof.csv")) {
      const CsvTable t = read_csv(run / "gof.csv");
      for (const auto& row : t.rows) add("likelihood_gof", row.at(1), row.at(2));
    }
    if (fs::exists(run / "sbc.csv")) {
      const CsvTable t = read_csv(run / "sbc.csv");
      for (const auto& row : t.rows) {
        auto& os = sbc[model];
        os << method << ',' << seed;
        for (const auto& cell : row) os << ',' << cell;
        os << '\n';
      }
    }
    seen.emplace_back(run.string(), model, std::move(present));
  }

  for (const auto& [run, model, present] : seen)
    for (const auto& metric : metrics_of_model[model])
      if (!present.count(metric)) warnings.push_back(run + ": no '" + metric + "' values, rows omitted");

  std::vector<std::string> written;
  for (const auto& [key, rows] : curves) {
    const std::string name = key.first + "_" + key.second + ".csv";
    write_text(out / name, std::string(kCurveHeader) + "\n" + rows.str());
    written.push_back(name);
  }
  for (const auto& [model, rows] : sbc) {
    const std::string name = model + "_sbc.csv";
    write_text(out / name, std::string(kSbcCurveHeader) + "\n" + rows.str());
    written.push_back(name);
  }
  return written;
}

}  // namespace snl::cli
