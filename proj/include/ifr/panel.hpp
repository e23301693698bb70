#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ifr/interval_fd.hpp"

namespace ifr {

// Interval-valued panel: every entity observed for every variable at every
// time point. Long-format CSV with header `entity,time,variable,lower,upper`.
struct PanelDataset {
  std::vector<std::string> entities;   // first-appearance order
  std::vector<double> times;           // ascending
  std::vector<std::string> variables;  // first-appearance order
  // One entities x times matrix per variable.
  std::vector<Matrix> lower;
  std::vector<Matrix> upper;

  std::optional<std::size_t> variable_index(const std::string& name) const;
  std::optional<std::size_t> entity_index(const std::string& name) const;

  // Same variables and times, restricted to the listed entity rows.
  PanelDataset select_entities(const std::vector<std::size_t>& rows) const;
};

PanelDataset parse_panel(std::istream& in, const std::string& source = "<stream>");
PanelDataset load_panel(const std::filesystem::path& path);

void write_panel(std::ostream& out, const PanelDataset& panel);
void save_panel(const std::filesystem::path& path, const PanelDataset& panel);

// Smooths one panel variable onto the common basis.
IntervalFunctionalDataset to_interval_dataset(const PanelDataset& panel, std::size_t variable,
                                              const BasisSpec& basis);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ifr
