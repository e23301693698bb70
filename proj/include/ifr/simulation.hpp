#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifr/interval_models.hpp"

namespace ifr {

// Uniform offset bounds of one interval-width scenario: (a, b) for the
// response range, (c, d) for the predictor ranges.
struct SimCase {
  int index = 1;
  double a = 1.0, b = 1.5;
  double c = 1.0, d = 1.5;

  // Cases 1-4 of the reference study.
  static SimCase standard(int index);
};

struct SimConfig {
  int n = 200;           // curves per replicate; first half trains, second half tests
  int grid_size = 100;   // equally spaced on [0, 1]
  int num_predictors = 3;
  int num_basis = 8;
  int order = 4;
  double response_noise_variance = 4.0;
  double predictor_noise_variance = 4.0;
  int mc = 250;
  int mcm_replicates = 100;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// exp(-100 (s - s')^2) on the grid.
Matrix se_covariance(std::span<const double> grid);

// Draws from a zero-mean Gaussian process with the squared-exponential
// covariance above. The grid covariance is factored once; diagonal jitter
// starts at 1e-10 and grows tenfold up to 1e-6 until the factorization
// succeeds.
class GaussianProcessSampler {
 public:
  explicit GaussianProcessSampler(std::vector<double> grid);

  const std::vector<double>& grid() const noexcept { return grid_; }
  double jitter() const noexcept { return jitter_; }
  const Matrix& covariance() const noexcept { return covariance_; }

  Vector sample(Rng& rng) const;
  // n independent draws as rows.
  Matrix sample_rows(Rng& rng, Eigen::Index n) const;

 private:
  std::vector<double> grid_;
  Matrix covariance_;
  Matrix factor_;  // lower triangular
  double jitter_ = 0.0;
};

Vector gp_sample(std::span<const double> grid, std::uint64_t seed);

// Coefficient surfaces beta_1..beta_3 of the generating model (m is 1-based).
double true_beta(int m, double s, double t);

struct SimulatedData {
  std::vector<double> grid;
  IntervalFunctionalDataset y;
  std::vector<IntervalFunctionalDataset> x;

  // Raw grid values before smoothing, N x J each.
  Matrix y_center;
  Matrix y_lower, y_upper;
  std::vector<Matrix> x_center;
  std::vector<Matrix> x_lower, x_upper;
  // Per-curve uniform range offsets.
  Vector y_offset;
  std::vector<Vector> x_offset;
  // Raw (i, j) cells, response and predictors combined, with lower > upper.
  Eigen::Index raw_inversions = 0;
};

SimulatedData generate(const SimConfig& config, const SimCase& sim_case, std::uint64_t seed);

struct StudyRow {
  int case_index = 0;
  int replicate = 0;
  ModelKind model = ModelKind::kFlm;
  double amse_lower = 0.0;
  double amse_upper = 0.0;
  std::optional<double> cp_lower;  // MCM only
  std::optional<double> cp_upper;
  Eigen::Index prediction_inversions = 0;
};

struct MetricsReport {
  // Sorted by (case order given, replicate, model order given).
  std::vector<StudyRow> rows;
  Eigen::Index raw_inversions = 0;
  Eigen::Index raw_cells = 0;
};

// Monte Carlo study: for every case and replicate, generate, train on the
// first half, predict the second half and score every model. Replicates run
// on worker threads; results depend only on (config.seed, case, replicate).
MetricsReport run_study(const SimConfig& config, std::span<const SimCase> cases,
                        std::span<const ModelKind> models, int threads = 0);

// Seed of replicate `replicate` within case `case_index`.
std::uint64_t replicate_seed(std::uint64_t master, int case_index, int replicate) noexcept;

// AMSE (mean L2 distance over curves) between N x J truth and prediction.
double amse(const Matrix& truth, const Matrix& predicted, std::span<const double> grid);

// Fraction of cells with lo <= truth <= hi.
double coverage(const Matrix& truth, const Matrix& lo, const Matrix& hi);

struct SummaryRow {
  std::string model;
  int case_index = 0;
  std::string metric;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t n_replicates = 0;
};

// Median and quartiles per (model, case, metric).
std::vector<SummaryRow> summarize(const MetricsReport& report);

}  // namespace ifr
