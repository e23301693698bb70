#pragma once

#include <vector>

#include "ifr/fda.hpp"

namespace ifr {

// Lower and upper limit curves on one common basis.
struct IntervalFunctionalSample {
  FunctionalSample lower;
  FunctionalSample upper;

  IntervalFunctionalSample(FunctionalSample lo, FunctionalSample up);
};

// Coefficientwise (upper + lower) / 2 and (upper - lower) / 2. Exact because
// both limits share the basis.
FunctionalSample center_curve(const IntervalFunctionalSample& s);
FunctionalSample range_curve(const IntervalFunctionalSample& s);

// N interval-valued curves on a common basis together with the J-point grid
// the raw observations were taken on.
class IntervalFunctionalDataset {
 public:
  IntervalFunctionalDataset(BasisSpec basis, std::vector<double> grid, Matrix lower_coef,
                            Matrix upper_coef);

  // Smooths each row of the N x J lower and upper value matrices with the
  // common basis. Rejects any lower_values(i, j) > upper_values(i, j).
  static IntervalFunctionalDataset from_discrete(const Matrix& lower_values,
                                                 const Matrix& upper_values,
                                                 std::vector<double> grid, const BasisSpec& spec);
  static IntervalFunctionalDataset from_discrete(const Matrix& lower_values,
                                                 const Matrix& upper_values,
                                                 const Smoother& smoother);

  const BasisSpec& basis() const noexcept { return basis_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  Eigen::Index size() const noexcept { return lower_.rows(); }

  const Matrix& lower_coefficients() const noexcept { return lower_; }
  const Matrix& upper_coefficients() const noexcept { return upper_; }

  FunctionalDataset lower() const { return {basis_, lower_}; }
  FunctionalDataset upper() const { return {basis_, upper_}; }
  FunctionalDataset center() const { return {basis_, 0.5 * (upper_ + lower_)}; }
  FunctionalDataset range() const { return {basis_, 0.5 * (upper_ - lower_)}; }

  IntervalFunctionalSample sample(Eigen::Index i) const;

  // Rows listed in `rows`, in that order.
  IntervalFunctionalDataset subset(const std::vector<Eigen::Index>& rows) const;

  // Limit curves evaluated on the grid, N x J.
  Matrix lower_values() const;
  Matrix upper_values() const;

 private:
  BasisSpec basis_;
  std::vector<double> grid_;
  Matrix lower_;
  Matrix upper_;
};

struct OrderedLimits {
  Matrix lower;
  Matrix upper;
  Eigen::Index inversions = 0;  // (i, j) cells that were swapped
};

// Pointwise min / max of two N x J prediction grids.
OrderedLimits enforce_ordering(const Matrix& lower_pred, const Matrix& upper_pred);

}  // namespace ifr
