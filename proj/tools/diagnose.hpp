#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace snl::cli {

struct DiagnoseOptions {
  // Simulator and model draws per goodness-of-fit estimate.
  int gof_n = 1000;
  // Calibration trials; 0 skips the check.
  int sbc_trials = 0;
  int sbc_samples = 9;
  // Sweeps between retained posterior draws in calibration runs.
  int sbc_thin = 50;
  int jobs = 1;
};

// Reads a run directory and writes gof.csv (flow-based methods) and, when
// requested, sbc.csv plus sbc_summary.json next to it. Returns the files
// written.
std::vector<std::string> diagnose(const std::filesystem::path& run, const DiagnoseOptions& options);

// Collects metrics from run directories into one CSV per (model, metric),
// columns method,simulations,value,seed, plus one SBC histogram CSV per
// model. Returns the files written; problems are reported on `warnings`.
std::vector<std::string> emit_curves(const std::vector<std::filesystem::path>& runs, const std::filesystem::path& out,
                                     std::vector<std::string>& warnings);

inline constexpr const char* kCurveHeader = "method,simulations,value,seed";
inline constexpr const char* kSbcCurveHeader = "method,seed,parameter,rank,count,band_lower,band_upper";

}  // namespace snl::cli
