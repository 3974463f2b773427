#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "snl/common.hpp"

namespace snl::cli {

// Shortest text that reads back to the same double.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::ordered_json read_json(const std::filesystem::path& path);

// Header theta_1..theta_d, one row per sample.
void write_samples_csv(const std::filesystem::path& path, const std::vector<ParamVector>& samples);
std::vector<ParamVector> read_samples_csv(const std::filesystem::path& path);

// Minimal CSV reading for the files this tool writes: no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

std::vector<double> to_std(const Vector& v);

}  // namespace snl::cli
