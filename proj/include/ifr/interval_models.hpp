#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ifr/fof_regression.hpp"
#include "ifr/interval_fd.hpp"

namespace ifr {

enum class ModelKind { kFlm, kCm, kCrm, kBcrm, kMcm };

inline constexpr ModelKind kAllModels[] = {ModelKind::kFlm, ModelKind::kCm, ModelKind::kCrm,
                                           ModelKind::kBcrm, ModelKind::kMcm};

std::string_view model_name(ModelKind kind) noexcept;
// Accepts the lower-case names "flm", "cm", "crm", "bcrm", "mcm".
ModelKind parse_model(std::string_view name);

struct ModelConfig {
  int mcm_replicates = 100;
  std::uint64_t seed = 0;
};

// Training-sample means of the four components of one interval variable.
struct ComponentMeans {
  FunctionalSample lower;
  FunctionalSample upper;
  FunctionalSample center;
  FunctionalSample range;

  static ComponentMeans of(const IntervalFunctionalDataset& ds);
};

struct IntervalFitResult {
  ModelKind kind;
  // FLM: {lower, upper}; CM: {center}; CRM and BCRM: {center, range}; MCM: none.
  std::vector<FofFit> fits;
  // MCM only: per-replicate estimates and their average.
  std::vector<Matrix> mcm_replicates;
  std::optional<Matrix> mcm_b_bar;

  BasisSpec response_basis;
  ComponentMeans response_means;
  std::vector<ComponentMeans> predictor_means;
  std::vector<BasisSpec> predictor_bases;
  std::vector<Matrix> grams;  // one per (interval) predictor
};

IntervalFitResult fit(ModelKind kind, const IntervalFunctionalDataset& y,
                      std::span<const IntervalFunctionalDataset> x, const ModelConfig& config = {});

struct LimitPrediction {
  Matrix lower;  // N x J
  Matrix upper;
  // Cells where the raw prediction had lower > upper before the pointwise
  // min / max fix.
  Eigen::Index inversions = 0;
};

LimitPrediction predict_limits(const IntervalFitResult& fit,
                               std::span<const IntervalFunctionalDataset> x_new,
                               std::span<const double> grid);

// Whole-curve training residuals y - y_hat of the MCM point predictor.
struct ResidualPool {
  Matrix lower;  // N_train x J
  Matrix upper;
};

ResidualPool mcm_residual_pool(const IntervalFitResult& fit, const IntervalFunctionalDataset& y_train,
                               std::span<const IntervalFunctionalDataset> x_train,
                               std::span<const double> grid);

struct PredictionBand {
  std::vector<double> grid;
  double alpha = 0.05;
  Matrix lower_lo;  // Q^l_{alpha/2}, N x J
  Matrix lower_hi;  // Q^l_{1-alpha/2}
  Matrix upper_lo;  // Q^u_{alpha/2}
  Matrix upper_hi;  // Q^u_{1-alpha/2}
};

// Pointwise empirical quantile bands over the MCM replicates, each replicate
// perturbed by one residual curve drawn with replacement from the pool.
// alpha must lie in (0, 1]; alpha = 1 collapses the band onto the median.
PredictionBand mcm_prediction_band(const IntervalFitResult& fit,
                                   std::span<const IntervalFunctionalDataset> x_new,
                                   const ResidualPool& pool, double alpha,
                                   std::span<const double> grid, std::uint64_t seed);

}  // namespace ifr
