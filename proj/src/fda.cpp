#include "ifr/fda.hpp"

#include <cmath>
#include <sstream>

#include "ifr/error.hpp"

namespace ifr {

FunctionalSample::FunctionalSample(BasisSpec b, Vector c)
    : basis(std::move(b)), coefficients(std::move(c)) {
  if (coefficients.size() != basis.num_basis()) {
    fail(ErrorCategory::kDimension, "coefficient length differs from basis size");
  }
}

FunctionalDataset::FunctionalDataset(BasisSpec basis, Matrix coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
  if (coefficients_.cols() != basis_.num_basis()) {
    fail(ErrorCategory::kDimension, "coefficient width differs from basis size");
  }
}

namespace {
BasisSpec first_basis(std::span<const FunctionalSample> samples) {
  if (samples.empty()) fail(ErrorCategory::kValidation, "dataset needs at least one sample");
  return samples.front().basis;
}
}  // namespace

FunctionalDataset::FunctionalDataset(std::span<const FunctionalSample> samples)
    : basis_(first_basis(samples)),
      coefficients_(static_cast<Eigen::Index>(samples.size()), basis_.num_basis()) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].basis == basis_)) {
      fail(ErrorCategory::kDimension, "samples do not share one basis");
    }
    coefficients_.row(static_cast<Eigen::Index>(i)) = samples[i].coefficients.transpose();
  }
}

FunctionalSample FunctionalDataset::sample(Eigen::Index i) const {
  if (i < 0 || i >= size()) fail(ErrorCategory::kDomain, "sample index out of range");
  return {basis_, coefficients_.row(i).transpose()};
}

FunctionalSample mean_function(const FunctionalDataset& ds) {
  if (ds.size() == 0) fail(ErrorCategory::kValidation, "mean of an empty dataset");
  return {ds.basis(), ds.coefficients().colwise().mean().transpose()};
}

std::pair<FunctionalDataset, FunctionalSample> center(const FunctionalDataset& ds) {
  FunctionalSample mean = mean_function(ds);
  Matrix centered = ds.coefficients().rowwise() - mean.coefficients.transpose();
  return {FunctionalDataset(ds.basis(), std::move(centered)), std::move(mean)};
}

Vector eval_on_grid(const FunctionalSample& s, std::span<const double> grid) {
  return basis_matrix(s.basis, grid) * s.coefficients;
}

double uniform_step(std::span<const double> grid) {
  if (grid.size() < 2) fail(ErrorCategory::kValidation, "grid needs at least two points");
  const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(step > 0.0)) fail(ErrorCategory::kValidation, "grid must be increasing");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double d = grid[j] - grid[j - 1];
    if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step))) {
      std::ostringstream os;
      os << "grid spacing is not uniform at index " << j;
      fail(ErrorCategory::kValidation, os.str());
    }
  }
  return step;
}

double l2_distance_values(std::span<const double> f, std::span<const double> g,
                          std::span<const double> grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    fail(ErrorCategory::kDimension, "l2_distance: curve length differs from grid size");
  }
  const double dt = uniform_step(grid);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double d = f[j] - g[j];
    acc += d * d;
  }
  return std::sqrt(acc * dt);
}

double l2_distance(const FunctionalSample& f, const FunctionalSample& g,
                   std::span<const double> grid) {
  if (!(f.basis.domain() == g.basis.domain())) {
    fail(ErrorCategory::kDimension, "l2_distance: curves live on different domains");
  }
  const Vector fv = eval_on_grid(f, grid);
  const Vector gv = eval_on_grid(g, grid);
  return l2_distance_values({fv.data(), static_cast<std::size_t>(fv.size())},
                            {gv.data(), static_cast<std::size_t>(gv.size())}, grid);
}

}  // namespace ifr
