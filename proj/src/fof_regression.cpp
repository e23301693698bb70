#include "ifr/fof_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ifr/error.hpp"

namespace ifr {

namespace {

Eigen::Index total_width(std::span<const Matrix> grams) {
  Eigen::Index w = 0;
  for (const auto& g : grams) w += g.cols();
  return w;
}

}  // namespace

Matrix design_matrix(std::span<const FunctionalDataset> predictors,
                     std::span<const FunctionalSample> means, std::span<const Matrix> grams) {
  if (predictors.empty()) fail(ErrorCategory::kValidation, "at least one predictor is required");
  if (means.size() != predictors.size() || grams.size() != predictors.size()) {
    fail(ErrorCategory::kDimension, "predictor, mean and Gram counts differ");
  }
  const Eigen::Index n = predictors.front().size();
  Matrix z(n, total_width(grams));
  Eigen::Index col = 0;
  for (std::size_t m = 0; m < predictors.size(); ++m) {
    const auto& ds = predictors[m];
    if (ds.size() != n) {
      std::ostringstream os;
      os << "predictor " << m << " has " << ds.size() << " samples, expected " << n;
      fail(ErrorCategory::kDimension, os.str());
    }
    if (!(ds.basis() == means[m].basis)) {
      std::ostringstream os;
      os << "predictor " << m << " basis differs from the training basis";
      fail(ErrorCategory::kDimension, os.str());
    }
    const Matrix& g = grams[m];
    if (g.rows() != ds.basis().num_basis() || g.cols() != ds.basis().num_basis()) {
      fail(ErrorCategory::kDimension, "Gram matrix size differs from predictor basis size");
    }
    z.middleCols(col, g.cols()) =
        (ds.coefficients().rowwise() - means[m].coefficients.transpose()) * g;
    col += g.cols();
  }
  return z;
}

FofDesign build_design(std::span<const FunctionalDataset> predictors, std::vector<Matrix> grams) {
  FofDesign design;
  design.grams = std::move(grams);
  for (const auto& ds : predictors) {
    design.predictor_bases.push_back(ds.basis());
    design.predictor_means.push_back(mean_function(ds));
  }
  design.z = design_matrix(predictors, design.predictor_means, design.grams);
  return design;
}

FofDesign build_design(std::span<const FunctionalDataset> predictors) {
  std::vector<Matrix> grams;
  grams.reserve(predictors.size());
  for (const auto& ds : predictors) grams.push_back(gram_matrix(ds.basis()));
  return build_design(predictors, std::move(grams));
}

MlEstimate estimate_ml(const Matrix& z, const Matrix& c) {
  if (z.rows() == 0) fail(ErrorCategory::kValidation, "ML estimation needs at least one sample");
  if (z.rows() != c.rows()) {
    fail(ErrorCategory::kDimension, "design and response sample counts differ");
  }
  const double n = static_cast<double>(z.rows());
  MlEstimate est;
  est.b_hat = lstsq(z, c);
  const Matrix resid = c - z * est.b_hat;
  est.sigma_hat = resid.transpose() * resid / n;
  est.sigma_hat = 0.5 * (est.sigma_hat + est.sigma_hat.transpose());

  const Eigen::SelfAdjointEigenSolver<Matrix> eig(est.sigma_hat);
  const Vector& lambda = eig.eigenvalues();
  const double lmax = lambda.size() ? lambda.maxCoeff() : 0.0;
  // Relative to the response scale too, so roundoff-level residuals of an
  // exact fit count as singular.
  const double scale = std::max(lmax, c.squaredNorm() / n);
  const double tol = static_cast<double>(lambda.size()) *
                     std::numeric_limits<double>::epsilon() * scale;
  if (lambda.size() > 0 && lambda.minCoeff() > tol && lmax > 0.0) {
    const double logdet = lambda.array().log().sum();
    const Matrix scatter = resid.transpose() * resid;
    const double trace = eig.eigenvectors().transpose().lazyProduct(scatter)
                             .lazyProduct(eig.eigenvectors())
                             .diagonal()
                             .cwiseQuotient(lambda)
                             .sum();
    est.log_likelihood = -0.5 * n * logdet - 0.5 * trace;
  }
  return est;
}

FofFit fit_ml(const FofDesign& design, const FunctionalDataset& response) {
  if (response.size() == 0) fail(ErrorCategory::kValidation, "response dataset is empty");
  if (design.z.rows() != response.size()) {
    fail(ErrorCategory::kDimension, "design and response sample counts differ");
  }
  auto [centered, mean] = center(response);
  MlEstimate est = estimate_ml(design.z, centered.coefficients());
  return FofFit{std::move(est.b_hat),    std::move(est.sigma_hat),   std::move(mean),
                response.basis(),        design.predictor_means,     design.predictor_bases,
                design.grams,            est.log_likelihood};
}

FunctionalDataset predict(const FofFit& fit, std::span<const FunctionalDataset> new_predictors) {
  if (new_predictors.size() != fit.num_predictors()) {
    fail(ErrorCategory::kDimension, "predictor count differs from the fitted model");
  }
  const Matrix z = design_matrix(new_predictors, fit.predictor_means, fit.grams);
  Matrix coef = z * fit.b_hat;
  coef.rowwise() += fit.response_mean.coefficients.transpose();
  return {fit.response_basis, std::move(coef)};
}

Eigen::Index FofFit::block_offset(std::size_t m) const {
  if (m >= num_predictors()) fail(ErrorCategory::kDomain, "predictor index out of range");
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < m; ++k) off += predictor_bases[k].num_basis();
  return off;
}

double coefficient_surface(const FofFit& fit, std::size_t m, double s, double t) {
  const Eigen::Index off = fit.block_offset(m);
  const BasisSpec& psi_basis = fit.predictor_bases[m];
  const Vector psi = evaluate_basis(psi_basis, s);
  const Vector phi = evaluate_basis(fit.response_basis, t);
  return psi.dot(fit.b_hat.middleRows(off, psi_basis.num_basis()) * phi);
}

}  // namespace ifr
