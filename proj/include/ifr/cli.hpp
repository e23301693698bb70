#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ifr/interval_models.hpp"

namespace ifr {

// Resolved settings shared by all subcommands. Sources, lowest precedence
// first: built-in defaults, the --config file, the IFR_SEED environment
// variable (seed only), command-line flags.
struct RunConfig {
  std::vector<ModelKind> models{std::begin(kAllModels), std::end(kAllModels)};
  std::optional<int> basis_k;  // command-specific default when unset
  int order = 4;
  int mcm_b = 100;
  double alpha = 0.05;
  double train_frac = 40.0 / 48.0;
  std::vector<std::string> train_ids;
  int repeats = 100;
  std::uint64_t seed = 0;
  int sim_case = 1;
  std::vector<int> cases{1, 2, 3, 4};
  int mc = 250;
  int n = 200;
  int grid_size = 100;
  int threads = 0;
  std::string response = "y";
  std::string in;
  std::string out;
  std::string fit;

  void validate() const;
};

// Reads a flat JSON object whose keys are the long flag names (hyphens or
// underscores) and applies it on top of `config`.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

std::vector<ModelKind> parse_model_list(const std::string& text);
std::vector<int> parse_case_list(const std::string& text);

// Entry point of the `ifr` tool; returns the process exit code. Errors are
// reported on `err` as one line: "error: <category>: <detail>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifr
