#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "snl/flow/maf.hpp"

namespace snl::flow {

// JSON document holding the configuration, per-layer orderings, every weight
// block and the batch-norm running moments. Doubles are written in shortest
// round-trip form, so loading reproduces log_prob bit for bit.
nlohmann::ordered_json to_json(const ConditionalMaf& flow);
ConditionalMaf flow_from_json(const nlohmann::ordered_json& doc);

void save_flow(const ConditionalMaf& flow, const std::filesystem::path& path);
ConditionalMaf load_flow(const std::filesystem::path& path);

}  // namespace snl::flow
