#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ifr/fda.hpp"

namespace ifr {

// Function-on-function linear regression reduced to multivariate regression
// on basis coefficients. With predictor m expanded as d_im' Psi_m(s), the
// design row for sample i is z_i = (d_i1' zeta_1, ..., d_iM' zeta_M) where
// zeta_m is the Gram matrix of Psi_m, and the response coefficient rows obey
// c_i = B' z_i + e_i.

struct FofDesign {
  Matrix z;  // N x sum_m K_m, built from centered predictors
  std::vector<BasisSpec> predictor_bases;
  std::vector<Matrix> grams;
  std::vector<FunctionalSample> predictor_means;
};

// Centers every predictor and stacks the D_m zeta_m blocks side by side.
FofDesign build_design(std::span<const FunctionalDataset> predictors);

// As above with caller-supplied Gram matrices (one per predictor).
FofDesign build_design(std::span<const FunctionalDataset> predictors, std::vector<Matrix> grams);

// Design rows for `predictors` centered by the given means.
Matrix design_matrix(std::span<const FunctionalDataset> predictors,
                     std::span<const FunctionalSample> means, std::span<const Matrix> grams);

struct MlEstimate {
  Matrix b_hat;      // sum_m K_m x K_Y
  Matrix sigma_hat;  // K_Y x K_Y
  // -(N/2) log|Sigma| - (1/2) tr(Sigma^-1 R'R); absent when Sigma is singular.
  std::optional<double> log_likelihood;
};

// Closed-form ML on already centered response rows `c`:
// B = (Z'Z)^+ Z'C evaluated as the minimum-norm least-squares solution,
// Sigma = (C - ZB)'(C - ZB) / N.
MlEstimate estimate_ml(const Matrix& z, const Matrix& c);

struct FofFit {
  Matrix b_hat;
  Matrix sigma_hat;
  FunctionalSample response_mean;
  BasisSpec response_basis;
  std::vector<FunctionalSample> predictor_means;
  std::vector<BasisSpec> predictor_bases;
  std::vector<Matrix> grams;
  std::optional<double> log_likelihood;

  std::size_t num_predictors() const noexcept { return predictor_bases.size(); }
  // Row offset of predictor m's block inside b_hat.
  Eigen::Index block_offset(std::size_t m) const;
};

FofFit fit_ml(const FofDesign& design, const FunctionalDataset& response);

// Predicted response curves: rows Z_new B + mean, with Z_new centered by the
// training predictor means.
FunctionalDataset predict(const FofFit& fit, std::span<const FunctionalDataset> new_predictors);

// beta_m(s, t) = Psi_m(s)' B_m Phi(t) for 0-based predictor index m.
double coefficient_surface(const FofFit& fit, std::size_t m, double s, double t);

}  // namespace ifr
