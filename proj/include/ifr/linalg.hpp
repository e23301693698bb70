#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>

namespace ifr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Moore-Penrose pseudoinverse by SVD. Singular values at or below
// max(rows, cols) * eps * sigma_max are treated as zero.
Matrix pseudo_inverse(const Matrix& a);

// Minimum-norm least-squares solution of a * x = b for every column of b,
// using the same SVD truncation as pseudo_inverse.
Matrix lstsq(const Matrix& a, const Matrix& b);

// Empirical quantile with linear interpolation between order statistics
// (h = (n - 1) p). `values` is reordered.
double quantile_inplace(std::span<double> values, double p);

using Rng = std::mt19937_64;

// Independent stream seed for replicate `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace ifr
