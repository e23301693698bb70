#include "ifr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ifr/error.hpp"
#include "ifr/model_io.hpp"
#include "ifr/panel.hpp"
#include "ifr/simulation.hpp"

namespace ifr {

using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string lower_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::uint64_t parse_seed(const std::string& text, const char* source) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos == text.size() && text.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCategory::kUsage, std::string(source) + ": seed must be a nonnegative integer");
}

}  // namespace

std::vector<ModelKind> parse_model_list(const std::string& text) {
  std::vector<ModelKind> out;
  for (const auto& name : split_list(text)) out.push_back(parse_model(lower_case(name)));
  if (out.empty()) fail(ErrorCategory::kUsage, "empty model list");
  return out;
}

std::vector<int> parse_case_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t pos = 0;
      const int c = std::stoi(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(SimCase::standard(c).index);
    } catch (const std::logic_error&) {
      fail(ErrorCategory::kUsage, "invalid case '" + item + "'");
    }
  }
  if (out.empty()) fail(ErrorCategory::kUsage, "empty case list");
  return out;
}

void RunConfig::validate() const {
  if (models.empty()) fail(ErrorCategory::kUsage, "no models selected");
  if (basis_k && *basis_k < order) fail(ErrorCategory::kUsage, "basis-k must be >= order");
  if (order < 1) fail(ErrorCategory::kUsage, "order must be >= 1");
  if (mcm_b < 2) fail(ErrorCategory::kUsage, "mcm-b must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCategory::kUsage, "alpha must lie in (0, 1)");
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    fail(ErrorCategory::kUsage, "train-frac must lie in (0, 1)");
  }
  if (repeats < 1) fail(ErrorCategory::kUsage, "repeats must be >= 1");
  if (mc < 1) fail(ErrorCategory::kUsage, "mc must be >= 1");
  if (n < 4) fail(ErrorCategory::kUsage, "n must be >= 4");
}

void apply_config_file(const std::filesystem::path& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCategory::kUsage, "config '" + path.string() + "': " + e.what());
  }
  if (!j.is_object()) fail(ErrorCategory::kUsage, "config must be a flat JSON object");

  auto text_list = [](const json& v) {
    if (v.is_array()) {
      std::string joined;
      for (const auto& item : v) {
        if (!joined.empty()) joined += ',';
        joined += item.is_string() ? item.get<std::string>() : item.dump();
      }
      return joined;
    }
    return v.is_string() ? v.get<std::string>() : v.dump();
  };

  for (const auto& [raw_key, v] : j.items()) {
    std::string key = raw_key;
    std::replace(key.begin(), key.end(), '-', '_');
    try {
      if (key == "model" || key == "models") c.models = parse_model_list(text_list(v));
      else if (key == "basis_k") c.basis_k = v.get<int>();
      else if (key == "order") c.order = v.get<int>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "mcm_b") c.mcm_b = v.get<int>();
      else if (key == "case") c.sim_case = SimCase::standard(v.get<int>()).index;
      else if (key == "cases") c.cases = parse_case_list(text_list(v));
      else if (key == "mc") c.mc = v.get<int>();
      else if (key == "n") c.n = v.get<int>();
      else if (key == "seed") c.seed = v.is_string() ? parse_seed(v.get<std::string>(), "config") : v.get<std::uint64_t>();
      else if (key == "train_frac") c.train_frac = v.get<double>();
      else if (key == "train_ids") c.train_ids = split_list(text_list(v));
      else if (key == "repeats") c.repeats = v.get<int>();
      else if (key == "grid_size") c.grid_size = v.get<int>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "response") c.response = v.get<std::string>();
      else if (key == "in") c.in = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "fit") c.fit = v.get<std::string>();
      else fail(ErrorCategory::kUsage, "unknown config key '" + raw_key + "'");
    } catch (const json::exception&) {
      fail(ErrorCategory::kUsage, "config key '" + raw_key + "' has the wrong type");
    }
  }
}

namespace {

// Raw flag text; applied after the config file so flags win.
struct Flags {
  std::string model, models, cases, train_ids, seed, config;
  int basis_k = 0, order = 0, mcm_b = 0, sim_case = 0, mc = 0, n = 0, repeats = 0;
  double alpha = 0.0, train_frac = 0.0;
  std::string in, out, fit, response;
};

struct OptionSet {
  CLI::Option* model = nullptr;
  CLI::Option* models = nullptr;
  CLI::Option* basis_k = nullptr;
  CLI::Option* order = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* mcm_b = nullptr;
  CLI::Option* sim_case = nullptr;
  CLI::Option* cases = nullptr;
  CLI::Option* mc = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* train_frac = nullptr;
  CLI::Option* train_ids = nullptr;
  CLI::Option* repeats = nullptr;
  CLI::Option* in = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* config = nullptr;
  CLI::Option* fit = nullptr;
  CLI::Option* response = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

RunConfig resolve(const Flags& f, const OptionSet& o) {
  RunConfig c;
  if (given(o.config)) apply_config_file(f.config, c);
  if (const char* env = std::getenv("IFR_SEED"); env != nullptr && *env != '\0') {
    c.seed = parse_seed(env, "IFR_SEED");
  }
  if (given(o.model)) c.models = parse_model_list(f.model);
  if (given(o.models)) c.models = parse_model_list(f.models);
  if (given(o.basis_k)) c.basis_k = f.basis_k;
  if (given(o.order)) c.order = f.order;
  if (given(o.alpha)) c.alpha = f.alpha;
  if (given(o.mcm_b)) c.mcm_b = f.mcm_b;
  if (given(o.sim_case)) c.sim_case = SimCase::standard(f.sim_case).index;
  if (given(o.cases)) c.cases = parse_case_list(f.cases);
  if (given(o.mc)) c.mc = f.mc;
  if (given(o.n)) c.n = f.n;
  if (given(o.seed)) c.seed = parse_seed(f.seed, "--seed");
  if (given(o.train_frac)) c.train_frac = f.train_frac;
  if (given(o.train_ids)) c.train_ids = split_list(f.train_ids);
  if (given(o.repeats)) c.repeats = f.repeats;
  if (given(o.in)) c.in = f.in;
  if (given(o.out)) c.out = f.out;
  if (given(o.fit)) c.fit = f.fit;
  if (given(o.response)) c.response = f.response;
  c.validate();
  return c;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) fail(ErrorCategory::kUsage, std::string(flag) + " is required");
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// ---------------------------------------------------------------- simulate

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  require(c.out, "--out");
  SimConfig sc;
  sc.n = c.n;
  sc.grid_size = c.grid_size;
  sc.num_basis = c.basis_k.value_or(8);
  sc.order = c.order;
  sc.seed = c.seed;
  const SimCase sim_case = SimCase::standard(c.sim_case);
  const SimulatedData data = generate(sc, sim_case, replicate_seed(c.seed, sim_case.index, 0));

  PanelDataset panel;
  panel.times = data.grid;
  for (int i = 0; i < sc.n; ++i) {
    std::ostringstream id;
    id << 'c' << sim_case.index << '_' << std::setw(4) << std::setfill('0') << i;
    panel.entities.push_back(id.str());
  }
  panel.variables.push_back("y");
  panel.lower.push_back(data.y_lower);
  panel.upper.push_back(data.y_upper);
  Eigen::Index swapped = 0;
  for (std::size_t m = 0; m < data.x_lower.size(); ++m) {
    panel.variables.push_back("x" + std::to_string(m + 1));
    // Measurement noise can cross the limits; the file stores ordered pairs.
    OrderedLimits ordered = enforce_ordering(data.x_lower[m], data.x_upper[m]);
    swapped += ordered.inversions;
    panel.lower.push_back(std::move(ordered.lower));
    panel.upper.push_back(std::move(ordered.upper));
  }
  OrderedLimits y_ordered = enforce_ordering(panel.lower[0], panel.upper[0]);
  swapped += y_ordered.inversions;
  panel.lower[0] = std::move(y_ordered.lower);
  panel.upper[0] = std::move(y_ordered.upper);
  save_panel(c.out, panel);
  out << "seed=" << c.seed << "\n"
      << "wrote " << c.out << " (" << sc.n << " entities, " << panel.variables.size()
      << " variables, " << sc.grid_size << " times, " << swapped << " raw cells reordered)\n";
  return 0;
}

// ---------------------------------------------------------------- panel -> model data

struct ModelData {
  std::optional<IntervalFunctionalDataset> y;
  std::vector<IntervalFunctionalDataset> x;
  std::vector<std::string> predictor_names;
};

BasisSpec panel_basis(const PanelDataset& panel, int k, int order) {
  if (panel.times.size() < 2) fail(ErrorCategory::kValidation, "panel needs at least two time points");
  return BasisSpec::clamped({panel.times.front(), panel.times.back()}, k, order);
}

ModelData model_data(const PanelDataset& panel, const std::string& response,
                     const std::vector<std::string>& predictors, const BasisSpec& basis,
                     bool response_required) {
  ModelData d;
  d.predictor_names = predictors;
  if (const auto r = panel.variable_index(response)) {
    d.y = to_interval_dataset(panel, *r, basis);
  } else if (response_required) {
    fail(ErrorCategory::kValidation, "response variable '" + response + "' not found in panel");
  }
  for (const auto& name : predictors) {
    const auto v = panel.variable_index(name);
    if (!v) fail(ErrorCategory::kValidation, "predictor variable '" + name + "' not found in panel");
    d.x.push_back(to_interval_dataset(panel, *v, basis));
  }
  if (d.x.empty()) fail(ErrorCategory::kValidation, "panel has no predictor variables");
  return d;
}

std::vector<std::string> predictor_names(const PanelDataset& panel, const std::string& response) {
  std::vector<std::string> out;
  for (const auto& v : panel.variables) {
    if (v != response) out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------- fit

int cmd_fit(const RunConfig& c, std::ostream& out) {
  require(c.in, "--in");
  require(c.out, "--out");
  if (c.models.size() != 1) fail(ErrorCategory::kUsage, "fit takes exactly one --model");
  const PanelDataset panel = load_panel(c.in);
  const BasisSpec basis = panel_basis(panel, c.basis_k.value_or(10), c.order);
  const ModelData d = model_data(panel, c.response, predictor_names(panel, c.response), basis, true);

  const ModelConfig mc{c.mcm_b, derive_seed(c.seed, 1)};
  SavedModel saved{fit(c.models.front(), *d.y, d.x, mc), c.response, d.predictor_names,
                   panel.times, c.seed, std::nullopt};
  if (saved.fit.kind == ModelKind::kMcm) {
    saved.residual_pool = mcm_residual_pool(saved.fit, *d.y, d.x, panel.times);
  }
  save_model(c.out, saved);
  out << "seed=" << c.seed << "\n"
      << "fitted " << model_name(saved.fit.kind) << " on " << panel.entities.size()
      << " entities; wrote " << c.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- predict

int cmd_predict(const RunConfig& c, std::ostream& out) {
  require(c.in, "--in");
  require(c.out, "--out");
  require(c.fit, "--fit");
  const SavedModel saved = load_model(c.fit);
  const PanelDataset panel = load_panel(c.in);
  if (panel.times != saved.grid) {
    fail(ErrorCategory::kDimension, "input time grid differs from the grid the model was fitted on");
  }
  const ModelData d = model_data(panel, saved.response_variable, saved.predictor_variables,
                                 saved.fit.response_basis, false);
  const LimitPrediction pred = predict_limits(saved.fit, d.x, panel.times);

  std::optional<PredictionBand> band;
  if (saved.fit.kind == ModelKind::kMcm && saved.residual_pool) {
    band = mcm_prediction_band(saved.fit, d.x, *saved.residual_pool, c.alpha, panel.times,
                               derive_seed(c.seed, 2));
  }

  std::ostringstream csv;
  csv << "entity,time,lower,upper,lower_band_lo,lower_band_hi,upper_band_lo,upper_band_hi\n";
  for (std::size_t i = 0; i < panel.entities.size(); ++i) {
    for (std::size_t j = 0; j < panel.times.size(); ++j) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto col = static_cast<Eigen::Index>(j);
      csv << panel.entities[i] << ',' << format_double(panel.times[j]) << ','
          << format_double(pred.lower(r, col)) << ',' << format_double(pred.upper(r, col));
      if (band) {
        csv << ',' << format_double(band->lower_lo(r, col)) << ','
            << format_double(band->lower_hi(r, col)) << ',' << format_double(band->upper_lo(r, col))
            << ',' << format_double(band->upper_hi(r, col));
      } else {
        csv << ",,,,";
      }
      csv << '\n';
    }
  }
  write_file_atomic(c.out, csv.str());
  out << "seed=" << c.seed << "\n";
  if (d.y) {
    out << "amse_lower=" << format_double(amse(d.y->lower_values(), pred.lower, panel.times))
        << "\namse_upper=" << format_double(amse(d.y->upper_values(), pred.upper, panel.times))
        << "\n";
  }
  out << "wrote " << c.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

json summary_json(const std::vector<SummaryRow>& rows, bool with_case) {
  json out = json::array();
  for (const auto& s : rows) {
    out.push_back({{"model", s.model},
                   {"case", with_case ? json(s.case_index) : json(nullptr)},
                   {"metric", s.metric},
                   {"median", s.median},
                   {"q1", s.q1},
                   {"q3", s.q3},
                   {"n_replicates", s.n_replicates}});
  }
  return out;
}

std::filesystem::path summary_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  return p.replace_extension(".json");
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  require(c.in, "--in");
  require(c.out, "--out");
  const PanelDataset panel = load_panel(c.in);
  const std::size_t n = panel.entities.size();
  if (n < 2) fail(ErrorCategory::kValidation, "evaluation needs at least two entities");
  const BasisSpec basis = panel_basis(panel, c.basis_k.value_or(10), c.order);
  const ModelData all = model_data(panel, c.response, predictor_names(panel, c.response), basis, true);

  std::vector<Eigen::Index> fixed_train;
  for (const auto& id : c.train_ids) {
    const auto idx = panel.entity_index(id);
    if (!idx) fail(ErrorCategory::kValidation, "train id '" + id + "' not found in panel");
    fixed_train.push_back(static_cast<Eigen::Index>(*idx));
  }
  std::sort(fixed_train.begin(), fixed_train.end());
  fixed_train.erase(std::unique(fixed_train.begin(), fixed_train.end()), fixed_train.end());

  const auto n_train = static_cast<std::size_t>(std::clamp<long>(
      std::lround(c.train_frac * static_cast<double>(n)), 1L, static_cast<long>(n) - 1));

  std::ostringstream csv;
  csv << "repeat,model,split,amse_lower,amse_upper,cp_lower,cp_upper\n";
  MetricsReport report;  // test split, reused for the summary
  for (int rep = 0; rep < c.repeats; ++rep) {
    std::vector<Eigen::Index> train, test;
    if (!fixed_train.empty()) {
      train = fixed_train;
    } else {
      std::vector<Eigen::Index> order(n);
      std::iota(order.begin(), order.end(), 0);
      Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(rep)));
      std::shuffle(order.begin(), order.end(), rng);
      train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
      std::sort(train.begin(), train.end());
    }
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      if (!std::binary_search(train.begin(), train.end(), i)) test.push_back(i);
    }
    if (test.empty()) fail(ErrorCategory::kUsage, "split leaves no test entities");

    const IntervalFunctionalDataset y_train = all.y->subset(train);
    const IntervalFunctionalDataset y_test = all.y->subset(test);
    std::vector<IntervalFunctionalDataset> x_train, x_test;
    for (const auto& ds : all.x) {
      x_train.push_back(ds.subset(train));
      x_test.push_back(ds.subset(test));
    }
    const std::uint64_t rep_seed = derive_seed(c.seed, static_cast<std::uint64_t>(rep));
    for (ModelKind kind : c.models) {
      const IntervalFitResult f = fit(kind, y_train, x_train, {c.mcm_b, derive_seed(rep_seed, 1)});
      const LimitPrediction in_sample = predict_limits(f, x_train, panel.times);
      const LimitPrediction held_out = predict_limits(f, x_test, panel.times);
      StudyRow row;
      row.replicate = rep;
      row.model = kind;
      row.amse_lower = amse(y_test.lower_values(), held_out.lower, panel.times);
      row.amse_upper = amse(y_test.upper_values(), held_out.upper, panel.times);
      if (kind == ModelKind::kMcm) {
        const ResidualPool pool = mcm_residual_pool(f, y_train, x_train, panel.times);
        const PredictionBand band =
            mcm_prediction_band(f, x_test, pool, c.alpha, panel.times, derive_seed(rep_seed, 2));
        row.cp_lower = coverage(y_test.lower_values(), band.lower_lo, band.lower_hi);
        row.cp_upper = coverage(y_test.upper_values(), band.upper_lo, band.upper_hi);
      }
      csv << rep << ',' << model_name(kind) << ",train,"
          << format_double(amse(y_train.lower_values(), in_sample.lower, panel.times)) << ','
          << format_double(amse(y_train.upper_values(), in_sample.upper, panel.times)) << ",,\n";
      csv << rep << ',' << model_name(kind) << ",test," << format_double(row.amse_lower) << ','
          << format_double(row.amse_upper) << ',' << opt(row.cp_lower) << ',' << opt(row.cp_upper)
          << '\n';
      report.rows.push_back(row);
    }
  }
  write_file_atomic(c.out, csv.str());
  const auto json_path = summary_path(c.out);
  write_file_atomic(json_path, summary_json(summarize(report), false).dump(1) + "\n");
  out << "seed=" << c.seed << "\n"
      << "wrote " << c.out << " and " << json_path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- mc-study

int cmd_mc_study(const RunConfig& c, std::ostream& out) {
  require(c.out, "--out");
  SimConfig sc;
  sc.n = c.n;
  sc.grid_size = c.grid_size;
  sc.num_basis = c.basis_k.value_or(8);
  sc.order = c.order;
  sc.mc = c.mc;
  sc.mcm_replicates = c.mcm_b;
  sc.alpha = c.alpha;
  sc.seed = c.seed;
  std::vector<SimCase> cases;
  for (int idx : c.cases) cases.push_back(SimCase::standard(idx));
  const MetricsReport report = run_study(sc, cases, c.models, c.threads);

  std::ostringstream csv;
  csv << "case,replicate,model,amse_lower,amse_upper,cp_lower,cp_upper,prediction_inversions\n";
  for (const auto& r : report.rows) {
    csv << r.case_index << ',' << r.replicate << ',' << model_name(r.model) << ','
        << format_double(r.amse_lower) << ',' << format_double(r.amse_upper) << ','
        << opt(r.cp_lower) << ',' << opt(r.cp_upper) << ',' << r.prediction_inversions << '\n';
  }
  write_file_atomic(c.out, csv.str());
  const auto json_path = summary_path(c.out);
  write_file_atomic(json_path, summary_json(summarize(report), true).dump(1) + "\n");
  out << "seed=" << c.seed << "\n"
      << "raw_inversions=" << report.raw_inversions << '/' << report.raw_cells << "\n"
      << "wrote " << report.rows.size() << " rows to " << c.out << " and " << json_path.string()
      << "\n";
  return 0;
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kUsage: return 2;
    case ErrorCategory::kValidation:
    case ErrorCategory::kDimension:
    case ErrorCategory::kDomain: return 3;
    case ErrorCategory::kIo: return 4;
    case ErrorCategory::kNumeric: return 5;
  }
  return 1;
}

constexpr const char* kSimulateHelp =
    "Writes one simulated panel (variables y, x1..x3) as long CSV:\n"
    "  entity,time,variable,lower,upper";
constexpr const char* kFitHelp =
    "Fits one model on every entity of --in; the response is --response (default y),\n"
    "all other variables are predictors. Writes a JSON model file to --out.";
constexpr const char* kPredictHelp =
    "Predicts limit curves for every entity of --in with the model in --fit. Output CSV:\n"
    "  entity,time,lower,upper,lower_band_lo,lower_band_hi,upper_band_lo,upper_band_hi\n"
    "Band columns are filled for MCM models only.";
constexpr const char* kEvaluateHelp =
    "Repeated random train/test split protocol. Output CSV:\n"
    "  repeat,model,split,amse_lower,amse_upper,cp_lower,cp_upper\n"
    "plus a JSON summary (same path, .json) of the test split with keys\n"
    "  model, case, metric, median, q1, q3, n_replicates";
constexpr const char* kStudyHelp =
    "Monte Carlo simulation study. Output CSV:\n"
    "  case,replicate,model,amse_lower,amse_upper,cp_lower,cp_upper,prediction_inversions\n"
    "plus a JSON summary (same path, .json) with keys\n"
    "  model, case, metric, median, q1, q3, n_replicates";

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Function-on-function regression for interval-valued functional data", "ifr"};
  app.require_subcommand(1);
  Flags f;

  struct Sub {
    CLI::App* app;
    OptionSet o;
  };
  auto add_common = [&](CLI::App* sub, OptionSet& o) {
    o.config = sub->add_option("--config", f.config, "flat JSON config file");
    o.seed = sub->add_option("--seed", f.seed, "master seed (env IFR_SEED overrides the config file)");
    o.out = sub->add_option("--out", f.out, "output path");
  };
  auto add_model_opts = [&](CLI::App* sub, OptionSet& o) {
    o.basis_k = sub->add_option("--basis-k", f.basis_k, "basis functions per curve");
    o.order = sub->add_option("--order", f.order, "B-spline order (degree + 1)");
    o.mcm_b = sub->add_option("--mcm-b", f.mcm_b, "MCM replicates");
    o.alpha = sub->add_option("--alpha", f.alpha, "significance level of MCM bands");
  };

  Sub simulate{app.add_subcommand("simulate", "write a simulated interval panel")->footer(kSimulateHelp), {}};
  add_common(simulate.app, simulate.o);
  simulate.o.sim_case = simulate.app->add_option("--case", f.sim_case, "simulation case 1-4");
  simulate.o.n = simulate.app->add_option("--n", f.n, "number of curves");
  simulate.o.basis_k = simulate.app->add_option("--basis-k", f.basis_k, "basis size (validation only)");

  Sub fit_cmd{app.add_subcommand("fit", "fit one model to a panel")->footer(kFitHelp), {}};
  add_common(fit_cmd.app, fit_cmd.o);
  add_model_opts(fit_cmd.app, fit_cmd.o);
  fit_cmd.o.model = fit_cmd.app->add_option("--model", f.model, "flm|cm|crm|bcrm|mcm");
  fit_cmd.o.in = fit_cmd.app->add_option("--in", f.in, "panel CSV");
  fit_cmd.o.response = fit_cmd.app->add_option("--response", f.response, "response variable");

  Sub predict_cmd{app.add_subcommand("predict", "predict limit curves")->footer(kPredictHelp), {}};
  add_common(predict_cmd.app, predict_cmd.o);
  predict_cmd.o.in = predict_cmd.app->add_option("--in", f.in, "panel CSV");
  predict_cmd.o.fit = predict_cmd.app->add_option("--fit", f.fit, "model file written by fit");
  predict_cmd.o.alpha = predict_cmd.app->add_option("--alpha", f.alpha, "significance level of MCM bands");

  Sub evaluate{app.add_subcommand("evaluate", "repeated random-split evaluation")->footer(kEvaluateHelp), {}};
  add_common(evaluate.app, evaluate.o);
  add_model_opts(evaluate.app, evaluate.o);
  evaluate.o.models = evaluate.app->add_option("--models", f.models, "comma-separated model list");
  evaluate.o.in = evaluate.app->add_option("--in", f.in, "panel CSV");
  evaluate.o.response = evaluate.app->add_option("--response", f.response, "response variable");
  evaluate.o.train_frac = evaluate.app->add_option("--train-frac", f.train_frac, "training fraction");
  evaluate.o.train_ids = evaluate.app->add_option("--train-ids", f.train_ids, "fixed comma-separated training entities");
  evaluate.o.repeats = evaluate.app->add_option("--repeats", f.repeats, "number of random splits");

  Sub study{app.add_subcommand("mc-study", "Monte Carlo simulation study")->footer(kStudyHelp), {}};
  add_common(study.app, study.o);
  add_model_opts(study.app, study.o);
  study.o.models = study.app->add_option("--models", f.models, "comma-separated model list");
  study.o.cases = study.app->add_option("--cases", f.cases, "comma-separated case list");
  study.o.mc = study.app->add_option("--mc", f.mc, "Monte Carlo replicates");
  study.o.n = study.app->add_option("--n", f.n, "curves per replicate");

  std::vector<std::string> argv_store{"ifr"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    for (const CLI::App* sub : app.get_subcommands()) {
      out << sub->help();
      return 0;
    }
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: usage: " << msg << "\n";
    return 2;
  }

  try {
    if (simulate.app->parsed()) return cmd_simulate(resolve(f, simulate.o), out);
    if (fit_cmd.app->parsed()) return cmd_fit(resolve(f, fit_cmd.o), out);
    if (predict_cmd.app->parsed()) return cmd_predict(resolve(f, predict_cmd.o), out);
    if (evaluate.app->parsed()) return cmd_evaluate(resolve(f, evaluate.o), out);
    if (study.app->parsed()) return cmd_mc_study(resolve(f, study.o), out);
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << category_name(e.category()) << ": " << msg << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ifr
