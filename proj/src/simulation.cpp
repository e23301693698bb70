#include "ifr/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "ifr/error.hpp"

namespace ifr {

SimCase SimCase::standard(int index) {
  switch (index) {
    case 1: return {1, 1.0, 1.5, 1.0, 1.5};
    case 2: return {2, 1.0, 3.0, 1.0, 3.0};
    case 3: return {3, 3.0, 5.0, 5.0, 8.0};
    case 4: return {4, 8.0, 20.0, 6.0, 15.0};
    default: break;
  }
  fail(ErrorCategory::kUsage, "simulation case must be 1, 2, 3 or 4");
}

void SimConfig::validate() const {
  if (n < 4) fail(ErrorCategory::kUsage, "simulation needs n >= 4");
  if (num_predictors < 1) fail(ErrorCategory::kUsage, "simulation needs at least one predictor");
  if (num_basis < order || order < 1) fail(ErrorCategory::kUsage, "invalid basis count / order");
  if (grid_size < num_basis) fail(ErrorCategory::kUsage, "grid size must be >= basis count");
  if (mc < 1) fail(ErrorCategory::kUsage, "mc must be >= 1");
  if (mcm_replicates < 2) fail(ErrorCategory::kUsage, "MCM replicates must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCategory::kUsage, "alpha must lie in (0, 1)");
  if (response_noise_variance < 0.0 || predictor_noise_variance < 0.0) {
    fail(ErrorCategory::kUsage, "noise variances must be nonnegative");
  }
}

Matrix se_covariance(std::span<const double> grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double d = grid[i] - grid[j];
      k(i, j) = k(j, i) = std::exp(-100.0 * d * d);
    }
  }
  return k;
}

GaussianProcessSampler::GaussianProcessSampler(std::vector<double> grid)
    : grid_(std::move(grid)), covariance_(se_covariance(grid_)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    Eigen::LLT<Matrix> llt(covariance_ + jitter * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
  }
  fail(ErrorCategory::kNumeric, "GP covariance factorization failed with jitter up to 1e-6");
}

Matrix GaussianProcessSampler::sample_rows(Rng& rng, Eigen::Index n) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, factor_.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  }
  return z * factor_.transpose();
}

Vector GaussianProcessSampler::sample(Rng& rng) const {
  return sample_rows(rng, 1).row(0).transpose();
}

Vector gp_sample(std::span<const double> grid, std::uint64_t seed) {
  Rng rng(seed);
  return GaussianProcessSampler({grid.begin(), grid.end()}).sample(rng);
}

double true_beta(int m, double s, double t) {
  switch (m) {
    case 1: return (1.0 - s) * (1.0 - s) * (t - 0.5) * (t - 0.5);
    case 2: return std::exp(-3.0 * (s - 1.0) * (s - 1.0)) * std::exp(-5.0 * (t - 0.5) * (t - 0.5));
    case 3:
      return std::exp(-5.0 * (s - 0.5) * (s - 0.5) - 5.0 * (t - 0.5) * (t - 0.5)) +
             8.0 * std::exp(-5.0 * (s - 1.5) * (s - 1.5) - 5.0 * (t - 0.5) * (t - 0.5));
    default: break;
  }
  fail(ErrorCategory::kDomain, "coefficient surface index must be 1, 2 or 3");
}

namespace {

// W(k, j) = beta_m(s_k, t_j) * ds with the left-endpoint rule (last row 0),
// so that X * W approximates the integral over s.
Matrix integration_kernel(int m, std::span<const double> grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double ds = grid[1] - grid[0];
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) w(k, j) = true_beta(m, grid[k], grid[j]) * ds;
  }
  return w;
}

int kernel_index(int m) { return (m % 3) + 1; }

Vector uniform_offsets(Rng& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

Matrix gaussian_noise(Rng& rng, Eigen::Index rows, Eigen::Index cols, double variance) {
  if (variance == 0.0) return Matrix::Zero(rows, cols);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Matrix e(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) e(i, j) = normal(rng);
  }
  return e;
}

}  // namespace

SimulatedData generate(const SimConfig& config, const SimCase& sc, std::uint64_t seed) {
  config.validate();
  if (!(sc.a < sc.b) || !(sc.c < sc.d)) {
    fail(ErrorCategory::kUsage, "simulation case needs a < b and c < d");
  }
  const std::vector<double> grid = linspace(0.0, 1.0, config.grid_size);
  const Eigen::Index n = config.n;
  const Eigen::Index j_count = config.grid_size;
  const GaussianProcessSampler gp(grid);
  const Smoother smoother(BasisSpec::clamped({0.0, 1.0}, config.num_basis, config.order), grid);
  Rng rng(seed);

  std::vector<Matrix> x_center;
  Matrix y_center = Matrix::Zero(n, j_count);
  for (int m = 0; m < config.num_predictors; ++m) {
    Matrix xc = gp.sample_rows(rng, n).array() + 10.0;
    // Predictors beyond the third reuse the three surfaces cyclically.
    y_center += xc * integration_kernel(kernel_index(m), grid);
    x_center.push_back(std::move(xc));
  }
  y_center += gaussian_noise(rng, n, j_count, config.response_noise_variance);

  SimulatedData out{grid,
                    IntervalFunctionalDataset(smoother.spec(), grid, Matrix::Zero(n, config.num_basis),
                                              Matrix::Zero(n, config.num_basis)),
                    {},
                    y_center,
                    {},
                    {},
                    std::move(x_center),
                    {},
                    {},
                    uniform_offsets(rng, n, sc.a, sc.b),
                    {},
                    0};

  const Matrix y_range = out.y_center.colwise() + out.y_offset;
  out.y_lower = out.y_center - 0.5 * y_range;
  out.y_upper = out.y_center + 0.5 * y_range;
  out.raw_inversions += (out.y_lower.array() > out.y_upper.array()).count();
  out.y = IntervalFunctionalDataset(smoother.spec(), grid, smoother.smooth_rows(out.y_lower),
                                    smoother.smooth_rows(out.y_upper));

  for (int m = 0; m < config.num_predictors; ++m) {
    const Matrix& xc = out.x_center[m];
    out.x_offset.push_back(uniform_offsets(rng, n, sc.c, sc.d));
    const Matrix x_range = xc.colwise() + out.x_offset.back();
    Matrix lo = xc - 0.5 * x_range + gaussian_noise(rng, n, j_count, config.predictor_noise_variance);
    Matrix up = xc + 0.5 * x_range + gaussian_noise(rng, n, j_count, config.predictor_noise_variance);
    out.raw_inversions += (lo.array() > up.array()).count();
    out.x.emplace_back(smoother.spec(), grid, smoother.smooth_rows(lo), smoother.smooth_rows(up));
    out.x_lower.push_back(std::move(lo));
    out.x_upper.push_back(std::move(up));
  }
  return out;
}

std::uint64_t replicate_seed(std::uint64_t master, int case_index, int replicate) noexcept {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(case_index)),
                     static_cast<std::uint64_t>(replicate));
}

double amse(const Matrix& truth, const Matrix& predicted, std::span<const double> grid) {
  if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
    fail(ErrorCategory::kDimension, "amse: shape mismatch");
  }
  if (truth.rows() == 0) fail(ErrorCategory::kValidation, "amse of zero curves");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    const Vector a = truth.row(i).transpose();
    const Vector b = predicted.row(i).transpose();
    acc += l2_distance_values({a.data(), static_cast<std::size_t>(a.size())},
                              {b.data(), static_cast<std::size_t>(b.size())}, grid);
  }
  return acc / static_cast<double>(truth.rows());
}

double coverage(const Matrix& truth, const Matrix& lo, const Matrix& hi) {
  if (truth.rows() != lo.rows() || truth.cols() != lo.cols() || truth.rows() != hi.rows() ||
      truth.cols() != hi.cols()) {
    fail(ErrorCategory::kDimension, "coverage: shape mismatch");
  }
  if (truth.size() == 0) fail(ErrorCategory::kValidation, "coverage of an empty grid");
  const auto inside = (lo.array() <= truth.array() && truth.array() <= hi.array()).count();
  return static_cast<double>(inside) / static_cast<double>(truth.size());
}

namespace {

struct ReplicateResult {
  std::vector<StudyRow> rows;
  Eigen::Index raw_inversions = 0;
  Eigen::Index raw_cells = 0;
};

ReplicateResult run_replicate(const SimConfig& config, const SimCase& sc, int replicate,
                              std::span<const ModelKind> models) {
  const std::uint64_t seed = replicate_seed(config.seed, sc.index, replicate);
  const SimulatedData data = generate(config, sc, derive_seed(seed, 0));

  const Eigen::Index n_train = config.n / 2;
  std::vector<Eigen::Index> train(static_cast<std::size_t>(n_train));
  std::vector<Eigen::Index> test(static_cast<std::size_t>(config.n - n_train));
  for (Eigen::Index i = 0; i < config.n; ++i) {
    (i < n_train ? train[static_cast<std::size_t>(i)]
                 : test[static_cast<std::size_t>(i - n_train)]) = i;
  }
  const IntervalFunctionalDataset y_train = data.y.subset(train);
  const IntervalFunctionalDataset y_test = data.y.subset(test);
  std::vector<IntervalFunctionalDataset> x_train, x_test;
  for (const auto& ds : data.x) {
    x_train.push_back(ds.subset(train));
    x_test.push_back(ds.subset(test));
  }
  const Matrix truth_lo = y_test.lower_values();
  const Matrix truth_up = y_test.upper_values();

  ReplicateResult out;
  out.raw_inversions = data.raw_inversions;
  out.raw_cells = static_cast<Eigen::Index>(1 + data.x.size()) * config.n * config.grid_size;
  const ModelConfig model_config{config.mcm_replicates, derive_seed(seed, 1)};
  for (ModelKind kind : models) {
    const IntervalFitResult f = fit(kind, y_train, x_train, model_config);
    const LimitPrediction pred = predict_limits(f, x_test, data.grid);
    StudyRow row;
    row.case_index = sc.index;
    row.replicate = replicate;
    row.model = kind;
    row.amse_lower = amse(truth_lo, pred.lower, data.grid);
    row.amse_upper = amse(truth_up, pred.upper, data.grid);
    row.prediction_inversions = pred.inversions;
    if (kind == ModelKind::kMcm) {
      const ResidualPool pool = mcm_residual_pool(f, y_train, x_train, data.grid);
      const PredictionBand band =
          mcm_prediction_band(f, x_test, pool, config.alpha, data.grid, derive_seed(seed, 2));
      row.cp_lower = coverage(truth_lo, band.lower_lo, band.lower_hi);
      row.cp_upper = coverage(truth_up, band.upper_lo, band.upper_hi);
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace

MetricsReport run_study(const SimConfig& config, std::span<const SimCase> cases,
                        std::span<const ModelKind> models, int threads) {
  config.validate();
  if (models.empty()) fail(ErrorCategory::kUsage, "no models selected");
  const std::size_t jobs = cases.size() * static_cast<std::size_t>(config.mc);
  std::vector<ReplicateResult> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const SimCase& sc = cases[job / static_cast<std::size_t>(config.mc)];
      const int rep = static_cast<int>(job % static_cast<std::size_t>(config.mc));
      try {
        results[job] = run_replicate(config, sc, rep, models);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  unsigned count = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  count = std::clamp<unsigned>(count, 1u, static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  }

  MetricsReport report;
  for (std::size_t job = 0; job < jobs; ++job) {
    if (errors[job]) {
      const SimCase& sc = cases[job / static_cast<std::size_t>(config.mc)];
      const int rep = static_cast<int>(job % static_cast<std::size_t>(config.mc));
      try {
        std::rethrow_exception(errors[job]);
      } catch (const Error& e) {
        std::ostringstream os;
        os << "case " << sc.index << ", replicate " << rep << ": " << e.what();
        throw Error(e.category(), os.str());
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "case " << sc.index << ", replicate " << rep << ": " << e.what();
        throw Error(ErrorCategory::kNumeric, os.str());
      }
    }
    auto& r = results[job];
    report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
    report.raw_inversions += r.raw_inversions;
    report.raw_cells += r.raw_cells;
  }
  return report;
}

std::vector<SummaryRow> summarize(const MetricsReport& report) {
  // Keyed by first appearance so the output follows the report order.
  std::vector<std::tuple<std::string, int, std::string>> order;
  std::map<std::tuple<std::string, int, std::string>, std::vector<double>> values;
  auto add = [&](const std::string& model, int c, const std::string& metric, double v) {
    auto key = std::make_tuple(model, c, metric);
    auto [it, inserted] = values.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(v);
  };
  for (const auto& row : report.rows) {
    const std::string model(model_name(row.model));
    add(model, row.case_index, "amse_lower", row.amse_lower);
    add(model, row.case_index, "amse_upper", row.amse_upper);
    if (row.cp_lower) add(model, row.case_index, "cp_lower", *row.cp_lower);
    if (row.cp_upper) add(model, row.case_index, "cp_upper", *row.cp_upper);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    auto v = values.at(key);
    SummaryRow s;
    std::tie(s.model, s.case_index, s.metric) = key;
    s.n_replicates = v.size();
    s.median = quantile_inplace(v, 0.5);
    s.q1 = quantile_inplace(v, 0.25);
    s.q3 = quantile_inplace(v, 0.75);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ifr
