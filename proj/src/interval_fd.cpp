#include "ifr/interval_fd.hpp"

#include <sstream>

#include "ifr/error.hpp"

namespace ifr {

IntervalFunctionalSample::IntervalFunctionalSample(FunctionalSample lo, FunctionalSample up)
    : lower(std::move(lo)), upper(std::move(up)) {
  if (!(lower.basis == upper.basis)) {
    fail(ErrorCategory::kDimension, "interval limits must share a common basis");
  }
}

FunctionalSample center_curve(const IntervalFunctionalSample& s) {
  return {s.lower.basis, 0.5 * (s.upper.coefficients + s.lower.coefficients)};
}

FunctionalSample range_curve(const IntervalFunctionalSample& s) {
  return {s.lower.basis, 0.5 * (s.upper.coefficients - s.lower.coefficients)};
}

IntervalFunctionalDataset::IntervalFunctionalDataset(BasisSpec basis, std::vector<double> grid,
                                                     Matrix lower_coef, Matrix upper_coef)
    : basis_(std::move(basis)),
      grid_(std::move(grid)),
      lower_(std::move(lower_coef)),
      upper_(std::move(upper_coef)) {
  if (lower_.rows() != upper_.rows()) {
    fail(ErrorCategory::kDimension, "lower and upper sample counts differ");
  }
  if (lower_.cols() != basis_.num_basis() || upper_.cols() != basis_.num_basis()) {
    fail(ErrorCategory::kDimension, "limit coefficient width differs from basis size");
  }
  check_grid(basis_.domain(), grid_);
}

IntervalFunctionalDataset IntervalFunctionalDataset::from_discrete(const Matrix& lower_values,
                                                                   const Matrix& upper_values,
                                                                   std::vector<double> grid,
                                                                   const BasisSpec& spec) {
  return from_discrete(lower_values, upper_values, Smoother(spec, std::move(grid)));
}

IntervalFunctionalDataset IntervalFunctionalDataset::from_discrete(const Matrix& lower_values,
                                                                   const Matrix& upper_values,
                                                                   const Smoother& smoother) {
  if (lower_values.rows() != upper_values.rows() || lower_values.cols() != upper_values.cols()) {
    fail(ErrorCategory::kDimension, "lower and upper value matrices differ in shape");
  }
  for (Eigen::Index i = 0; i < lower_values.rows(); ++i) {
    for (Eigen::Index j = 0; j < lower_values.cols(); ++j) {
      if (lower_values(i, j) > upper_values(i, j)) {
        std::ostringstream os;
        os << "inverted interval at sample " << i << ", grid point " << j << ": lower "
           << lower_values(i, j) << " > upper " << upper_values(i, j);
        fail(ErrorCategory::kValidation, os.str());
      }
    }
  }
  return {smoother.spec(), smoother.grid(), smoother.smooth_rows(lower_values),
          smoother.smooth_rows(upper_values)};
}

IntervalFunctionalSample IntervalFunctionalDataset::sample(Eigen::Index i) const {
  return {lower().sample(i), upper().sample(i)};
}

IntervalFunctionalDataset IntervalFunctionalDataset::subset(
    const std::vector<Eigen::Index>& rows) const {
  Matrix lo(static_cast<Eigen::Index>(rows.size()), lower_.cols());
  Matrix up(lo.rows(), upper_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= size()) fail(ErrorCategory::kDomain, "subset row out of range");
    lo.row(static_cast<Eigen::Index>(r)) = lower_.row(rows[r]);
    up.row(static_cast<Eigen::Index>(r)) = upper_.row(rows[r]);
  }
  return {basis_, grid_, std::move(lo), std::move(up)};
}

Matrix IntervalFunctionalDataset::lower_values() const {
  return lower_ * basis_matrix(basis_, grid_).transpose();
}

Matrix IntervalFunctionalDataset::upper_values() const {
  return upper_ * basis_matrix(basis_, grid_).transpose();
}

OrderedLimits enforce_ordering(const Matrix& lower_pred, const Matrix& upper_pred) {
  if (lower_pred.rows() != upper_pred.rows() || lower_pred.cols() != upper_pred.cols()) {
    fail(ErrorCategory::kDimension, "enforce_ordering: shape mismatch");
  }
  OrderedLimits out{lower_pred.cwiseMin(upper_pred), lower_pred.cwiseMax(upper_pred), 0};
  out.inversions = (lower_pred.array() > upper_pred.array()).count();
  return out;
}

}  // namespace ifr
