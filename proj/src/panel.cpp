#include "ifr/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "ifr/error.hpp"

namespace ifr {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
  }
  return out;
}

[[noreturn]] void row_error(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ": row " << line << ": " << what;
  fail(ErrorCategory::kValidation, os.str());
}

double parse_number(std::string_view text, const std::string& source, std::size_t line,
                    const char* column) {
  if (text.empty()) row_error(source, line, std::string("missing ") + column);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    row_error(source, line, std::string("invalid ") + column + " '" + std::string(text) + "'");
  }
  return v;
}

template <typename T>
std::size_t intern(std::vector<T>& names, std::map<T, std::size_t>& index, const T& key) {
  auto [it, inserted] = index.try_emplace(key, names.size());
  if (inserted) names.push_back(key);
  return it->second;
}

}  // namespace

std::optional<std::size_t> PanelDataset::variable_index(const std::string& name) const {
  const auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) return std::nullopt;
  return static_cast<std::size_t>(it - variables.begin());
}

std::optional<std::size_t> PanelDataset::entity_index(const std::string& name) const {
  const auto it = std::find(entities.begin(), entities.end(), name);
  if (it == entities.end()) return std::nullopt;
  return static_cast<std::size_t>(it - entities.begin());
}

PanelDataset PanelDataset::select_entities(const std::vector<std::size_t>& rows) const {
  PanelDataset out;
  out.times = times;
  out.variables = variables;
  for (std::size_t r : rows) {
    if (r >= entities.size()) fail(ErrorCategory::kDomain, "entity row out of range");
    out.entities.push_back(entities[r]);
  }
  for (std::size_t v = 0; v < variables.size(); ++v) {
    Matrix lo(static_cast<Eigen::Index>(rows.size()), lower[v].cols());
    Matrix up(lo.rows(), lo.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      lo.row(static_cast<Eigen::Index>(k)) = lower[v].row(static_cast<Eigen::Index>(rows[k]));
      up.row(static_cast<Eigen::Index>(k)) = upper[v].row(static_cast<Eigen::Index>(rows[k]));
    }
    out.lower.push_back(std::move(lo));
    out.upper.push_back(std::move(up));
  }
  return out;
}

PanelDataset parse_panel(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(ErrorCategory::kValidation, source + ": empty file");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    const auto header = split_fields(line);
    const std::vector<std::string_view> expected{"entity", "time", "variable", "lower", "upper"};
    if (header != expected) {
      fail(ErrorCategory::kValidation,
           source + ": header must be 'entity,time,variable,lower,upper'");
    }
  }

  struct Cell {
    std::size_t entity, variable;
    double time, lower, upper;
    std::size_t line;
  };
  std::vector<Cell> cells;
  PanelDataset panel;
  std::map<std::string, std::size_t> entity_ids, variable_ids;
  std::map<double, std::size_t> time_ids;
  std::vector<double> time_order;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) {
      std::ostringstream os;
      os << "expected 5 fields, found " << f.size();
      row_error(source, line_no, os.str());
    }
    if (f[0].empty()) row_error(source, line_no, "missing entity");
    if (f[2].empty()) row_error(source, line_no, "missing variable");
    Cell c{};
    c.line = line_no;
    c.time = parse_number(f[1], source, line_no, "time");
    c.lower = parse_number(f[3], source, line_no, "lower");
    c.upper = parse_number(f[4], source, line_no, "upper");
    if (c.lower > c.upper) {
      std::ostringstream os;
      os << "lower " << f[3] << " > upper " << f[4];
      row_error(source, line_no, os.str());
    }
    c.entity = intern(panel.entities, entity_ids, std::string(f[0]));
    c.variable = intern(panel.variables, variable_ids, std::string(f[2]));
    intern(time_order, time_ids, c.time);
    cells.push_back(c);
  }
  if (cells.empty()) fail(ErrorCategory::kValidation, source + ": no data rows");

  panel.times = time_order;
  std::sort(panel.times.begin(), panel.times.end());
  std::map<double, Eigen::Index> column;
  for (std::size_t j = 0; j < panel.times.size(); ++j) {
    column[panel.times[j]] = static_cast<Eigen::Index>(j);
  }

  const auto n_e = static_cast<Eigen::Index>(panel.entities.size());
  const auto n_t = static_cast<Eigen::Index>(panel.times.size());
  const double nan = std::nan("");
  for (std::size_t v = 0; v < panel.variables.size(); ++v) {
    panel.lower.push_back(Matrix::Constant(n_e, n_t, nan));
    panel.upper.push_back(Matrix::Constant(n_e, n_t, nan));
  }
  std::vector<std::vector<std::size_t>> seen(panel.variables.size(),
                                             std::vector<std::size_t>(n_e * n_t, 0));
  for (const Cell& c : cells) {
    const Eigen::Index i = static_cast<Eigen::Index>(c.entity);
    const Eigen::Index j = column.at(c.time);
    std::size_t& first = seen[c.variable][static_cast<std::size_t>(i * n_t + j)];
    if (first != 0) {
      std::ostringstream os;
      os << "duplicate (entity, time, variable) row, first seen at row " << first;
      row_error(source, c.line, os.str());
    }
    first = c.line;
    panel.lower[c.variable](i, j) = c.lower;
    panel.upper[c.variable](i, j) = c.upper;
  }
  for (std::size_t v = 0; v < panel.variables.size(); ++v) {
    for (Eigen::Index i = 0; i < n_e; ++i) {
      for (Eigen::Index j = 0; j < n_t; ++j) {
        if (seen[v][static_cast<std::size_t>(i * n_t + j)] == 0) {
          std::ostringstream os;
          os << source << ": ragged panel: entity '" << panel.entities[i] << "', variable '"
             << panel.variables[v] << "' has no row for time " << format_double(panel.times[j]);
          fail(ErrorCategory::kValidation, os.str());
        }
      }
    }
  }
  return panel;
}

PanelDataset load_panel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open '" + path.string() + "'");
  return parse_panel(in, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorCategory::kIo, "number formatting failed");
  return std::string(buf, ptr);
}

void write_panel(std::ostream& out, const PanelDataset& panel) {
  out << "entity,time,variable,lower,upper\n";
  for (std::size_t i = 0; i < panel.entities.size(); ++i) {
    for (std::size_t v = 0; v < panel.variables.size(); ++v) {
      for (std::size_t j = 0; j < panel.times.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(i);
        const auto c = static_cast<Eigen::Index>(j);
        out << panel.entities[i] << ',' << format_double(panel.times[j]) << ','
            << panel.variables[v] << ',' << format_double(panel.lower[v](r, c)) << ','
            << format_double(panel.upper[v](r, c)) << '\n';
      }
    }
  }
}

void save_panel(const std::filesystem::path& path, const PanelDataset& panel) {
  std::ostringstream os;
  write_panel(os, panel);
  write_file_atomic(path, os.str());
}

IntervalFunctionalDataset to_interval_dataset(const PanelDataset& panel, std::size_t variable,
                                              const BasisSpec& basis) {
  if (variable >= panel.variables.size()) fail(ErrorCategory::kDomain, "variable index out of range");
  return IntervalFunctionalDataset::from_discrete(panel.lower[variable], panel.upper[variable],
                                                  panel.times, basis);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCategory::kIo, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) fail(ErrorCategory::kIo, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCategory::kIo, "cannot move output into '" + path.string() + "'");
  }
}

}  // namespace ifr
