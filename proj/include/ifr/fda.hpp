#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ifr/basis.hpp"

namespace ifr {

// One curve as a coefficient vector on a basis.
struct FunctionalSample {
  BasisSpec basis;
  Vector coefficients;

  FunctionalSample(BasisSpec b, Vector c);
};

// N curves sharing one basis; row i of `coefficients` is sample i.
class FunctionalDataset {
 public:
  FunctionalDataset(BasisSpec basis, Matrix coefficients);
  FunctionalDataset(std::span<const FunctionalSample> samples);

  const BasisSpec& basis() const noexcept { return basis_; }
  const Matrix& coefficients() const noexcept { return coefficients_; }
  Eigen::Index size() const noexcept { return coefficients_.rows(); }
  FunctionalSample sample(Eigen::Index i) const;

 private:
  BasisSpec basis_;
  Matrix coefficients_;
};

FunctionalSample mean_function(const FunctionalDataset& ds);

// Centered dataset plus the removed mean.
std::pair<FunctionalDataset, FunctionalSample> center(const FunctionalDataset& ds);

Vector eval_on_grid(const FunctionalSample& s, std::span<const double> grid);

// Left-endpoint Riemann approximation of the L2 norm of f - g on an equally
// spaced grid: sqrt(sum_{j < J-1} (f - g)(t_j)^2 * dt).
double l2_distance(const FunctionalSample& f, const FunctionalSample& g,
                   std::span<const double> grid);

// Same rule applied to curves already evaluated on `grid`.
double l2_distance_values(std::span<const double> f, std::span<const double> g,
                          std::span<const double> grid);

// Uniform spacing of `grid`; throws kValidation when spacing is uneven.
double uniform_step(std::span<const double> grid);

}  // namespace ifr
