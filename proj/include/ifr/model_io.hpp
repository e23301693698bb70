#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifr/interval_models.hpp"

namespace ifr {

// Everything `predict` needs to run in a separate process.
struct SavedModel {
  IntervalFitResult fit;
  std::string response_variable;
  std::vector<std::string> predictor_variables;
  std::vector<double> grid;
  std::uint64_t seed = 0;
  std::optional<ResidualPool> residual_pool;  // MCM only
};

nlohmann::json to_json(const SavedModel& model);
SavedModel saved_model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const SavedModel& model);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace ifr
