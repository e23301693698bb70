#include "ifr/model_io.hpp"

#include <fstream>

#include "ifr/error.hpp"
#include "ifr/panel.hpp"

namespace ifr {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) {
    fail(ErrorCategory::kIo, "matrix row count does not match its data");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = data.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCategory::kIo, "matrix column count does not match its data");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json basis_json(const BasisSpec& b) { return json{{"order", b.order()}, {"knots", b.knots()}}; }

BasisSpec basis_from(const json& j) {
  return BasisSpec::from_knots(j.at("order").get<int>(), j.at("knots").get<std::vector<double>>());
}

// Samples are stored as bare coefficient arrays; the basis travels separately.
json means_json(const ComponentMeans& m) {
  return json{{"lower", vector_json(m.lower.coefficients)},
              {"upper", vector_json(m.upper.coefficients)},
              {"center", vector_json(m.center.coefficients)},
              {"range", vector_json(m.range.coefficients)}};
}

ComponentMeans means_from(const json& j, const BasisSpec& b) {
  return {{b, vector_from(j.at("lower"))},
          {b, vector_from(j.at("upper"))},
          {b, vector_from(j.at("center"))},
          {b, vector_from(j.at("range"))}};
}

json fof_json(const FofFit& f) {
  json means = json::array();
  for (const auto& m : f.predictor_means) means.push_back(vector_json(m.coefficients));
  json bases = json::array();
  for (const auto& b : f.predictor_bases) bases.push_back(basis_json(b));
  return json{{"b_hat", matrix_json(f.b_hat)},
              {"sigma_hat", matrix_json(f.sigma_hat)},
              {"response_basis", basis_json(f.response_basis)},
              {"response_mean", vector_json(f.response_mean.coefficients)},
              {"predictor_bases", std::move(bases)},
              {"predictor_means", std::move(means)},
              {"log_likelihood", f.log_likelihood ? json(*f.log_likelihood) : json(nullptr)}};
}

FofFit fof_from(const json& j) {
  const BasisSpec response_basis = basis_from(j.at("response_basis"));
  FofFit f{matrix_from(j.at("b_hat")),
           matrix_from(j.at("sigma_hat")),
           {response_basis, vector_from(j.at("response_mean"))},
           response_basis,
           {},
           {},
           {},
           std::nullopt};
  const json& bases = j.at("predictor_bases");
  const json& means = j.at("predictor_means");
  if (bases.size() != means.size()) fail(ErrorCategory::kIo, "predictor bases and means differ in count");
  for (std::size_t m = 0; m < bases.size(); ++m) {
    f.predictor_bases.push_back(basis_from(bases[m]));
    f.predictor_means.emplace_back(f.predictor_bases.back(), vector_from(means[m]));
    f.grams.push_back(gram_matrix(f.predictor_bases.back()));
  }
  if (!j.at("log_likelihood").is_null()) f.log_likelihood = j.at("log_likelihood").get<double>();
  return f;
}

}  // namespace

json to_json(const SavedModel& model) {
  const IntervalFitResult& f = model.fit;
  json fits = json::array();
  for (const auto& fof : f.fits) fits.push_back(fof_json(fof));
  json bases = json::array();
  json x_means = json::array();
  for (std::size_t m = 0; m < f.predictor_bases.size(); ++m) {
    bases.push_back(basis_json(f.predictor_bases[m]));
    x_means.push_back(means_json(f.predictor_means[m]));
  }
  json reps = json::array();
  for (const auto& b : f.mcm_replicates) reps.push_back(matrix_json(b));

  json out{{"format", "ifr-fit"},
           {"version", kFormatVersion},
           {"model", std::string(model_name(f.kind))},
           {"response_variable", model.response_variable},
           {"predictor_variables", model.predictor_variables},
           {"grid", model.grid},
           {"seed", model.seed},
           {"response_basis", basis_json(f.response_basis)},
           {"response_means", means_json(f.response_means)},
           {"predictor_bases", std::move(bases)},
           {"predictor_means", std::move(x_means)},
           {"fits", std::move(fits)},
           {"mcm_replicates", std::move(reps)},
           {"mcm_b_bar", f.mcm_b_bar ? matrix_json(*f.mcm_b_bar) : json(nullptr)}};
  if (model.residual_pool) {
    out["residual_pool"] = {{"lower", matrix_json(model.residual_pool->lower)},
                            {"upper", matrix_json(model.residual_pool->upper)}};
  } else {
    out["residual_pool"] = nullptr;
  }
  return out;
}

SavedModel saved_model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "ifr-fit") {
      fail(ErrorCategory::kIo, "not a fitted-model file");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      fail(ErrorCategory::kIo, "unsupported fitted-model version");
    }
    const BasisSpec response_basis = basis_from(j.at("response_basis"));
    IntervalFitResult f{parse_model(j.at("model").get<std::string>()),
                        {},
                        {},
                        std::nullopt,
                        response_basis,
                        means_from(j.at("response_means"), response_basis),
                        {},
                        {},
                        {}};
    const json& bases = j.at("predictor_bases");
    const json& means = j.at("predictor_means");
    if (bases.size() != means.size()) fail(ErrorCategory::kIo, "predictor bases and means differ in count");
    for (std::size_t m = 0; m < bases.size(); ++m) {
      f.predictor_bases.push_back(basis_from(bases[m]));
      f.predictor_means.push_back(means_from(means[m], f.predictor_bases.back()));
      f.grams.push_back(gram_matrix(f.predictor_bases.back()));
    }
    for (const auto& fj : j.at("fits")) f.fits.push_back(fof_from(fj));
    for (const auto& bj : j.at("mcm_replicates")) f.mcm_replicates.push_back(matrix_from(bj));
    if (!j.at("mcm_b_bar").is_null()) f.mcm_b_bar = matrix_from(j.at("mcm_b_bar"));

    const std::size_t expected_fits = f.kind == ModelKind::kMcm ? 0 : f.kind == ModelKind::kCm ? 1 : 2;
    if (f.fits.size() != expected_fits || (f.kind == ModelKind::kMcm && !f.mcm_b_bar)) {
      fail(ErrorCategory::kIo, "fitted-model file does not match its model kind");
    }

    SavedModel out{std::move(f),
                   j.at("response_variable").get<std::string>(),
                   j.at("predictor_variables").get<std::vector<std::string>>(),
                   j.at("grid").get<std::vector<double>>(),
                   j.at("seed").get<std::uint64_t>(),
                   std::nullopt};
    if (!j.at("residual_pool").is_null()) {
      out.residual_pool = ResidualPool{matrix_from(j.at("residual_pool").at("lower")),
                                       matrix_from(j.at("residual_pool").at("upper"))};
    }
    return out;
  } catch (const json::exception& e) {
    fail(ErrorCategory::kIo, std::string("malformed fitted-model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const SavedModel& model) {
  write_file_atomic(path, to_json(model).dump(1) + "\n");
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCategory::kIo, path.string() + ": " + e.what());
  }
  return saved_model_from_json(j);
}

}  // namespace ifr
