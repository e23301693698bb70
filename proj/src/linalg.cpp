#include "ifr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ifr/error.hpp"

namespace ifr {

namespace {

struct TruncatedSvd {
  Matrix u;
  Vector inv_sigma;
  Matrix v;
};

TruncatedSvd truncated_svd(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon() * sigma_max;
  Vector inv(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    inv(i) = sigma(i) > tol ? 1.0 / sigma(i) : 0.0;
  }
  return {svd.matrixU(), std::move(inv), svd.matrixV()};
}

}  // namespace

Matrix pseudo_inverse(const Matrix& a) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const auto s = truncated_svd(a);
  return s.v * s.inv_sigma.asDiagonal() * s.u.transpose();
}

Matrix lstsq(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorCategory::kDimension, "lstsq: row count mismatch");
  }
  if (a.size() == 0) return Matrix::Zero(a.cols(), b.cols());
  const auto s = truncated_svd(a);
  return s.v * (s.inv_sigma.asDiagonal() * (s.u.transpose() * b));
}

double quantile_inplace(std::span<double> values, double p) {
  if (values.empty()) fail(ErrorCategory::kDomain, "quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCategory::kDomain, "quantile probability outside [0, 1]");
  }
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double x_lo = values[lo];
  if (lo + 1 >= values.size()) return x_lo;
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return x_lo;
  const double x_hi = *std::min_element(values.begin() + lo + 1, values.end());
  return x_lo + frac * (x_hi - x_lo);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  // splitmix64 finalizer over a mix of both inputs
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::kDomain: return "domain";
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kDimension: return "dimension";
    case ErrorCategory::kNumeric: return "numeric";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kUsage: return "usage";
  }
  return "unknown";
}

}  // namespace ifr
