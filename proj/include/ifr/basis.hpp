#pragma once

#include <span>
#include <vector>

#include "ifr/linalg.hpp"

namespace ifr {

struct Domain {
  double lo = 0.0;
  double hi = 1.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return t >= lo && t <= hi; }
  friend bool operator==(const Domain&, const Domain&) = default;
};

// A clamped B-spline basis: the first and last `order` knots coincide with
// the domain ends, so the first basis function is 1 at the left end and the
// last is 1 at the right end.
class BasisSpec {
 public:
  // Equally spaced interior knots.
  static BasisSpec clamped(Domain domain, int num_basis, int order = 4);

  // Full knot vector supplied by the caller; it must be clamped and have
  // num_basis + order entries.
  static BasisSpec from_knots(int order, std::vector<double> knots);

  int order() const noexcept { return order_; }
  int degree() const noexcept { return order_ - 1; }
  int num_basis() const noexcept { return num_basis_; }
  const Domain& domain() const noexcept { return domain_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  // Distinct knot values, i.e. the polynomial break points.
  std::vector<double> breakpoints() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  BasisSpec(int order, int num_basis, Domain domain, std::vector<double> knots)
      : order_(order), num_basis_(num_basis), domain_(domain), knots_(std::move(knots)) {}

  int order_;
  int num_basis_;
  Domain domain_;
  std::vector<double> knots_;
};

// phi_1(t) ... phi_K(t). Throws kDomain for t outside the basis domain.
Vector evaluate_basis(const BasisSpec& spec, double t);

// Row j holds evaluate_basis(spec, grid[j]).
Matrix basis_matrix(const BasisSpec& spec, std::span<const double> grid);

// zeta_{jk} = integral of phi_j * phi_k over the domain, by Gauss-Legendre
// on every knot span (exact for the piecewise polynomial integrand).
Matrix gram_matrix(const BasisSpec& spec);

// Entries integral of phi_j * psi_k; both bases must share a domain.
Matrix cross_gram(const BasisSpec& row_spec, const BasisSpec& col_spec);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

// Least-squares projection of sampled values onto a basis, for a fixed
// observation grid. The projector is a pseudoinverse, so a rank-deficient
// grid never aborts.
class Smoother {
 public:
  Smoother(BasisSpec spec, std::vector<double> grid);

  const BasisSpec& spec() const noexcept { return spec_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  // J x K evaluation matrix.
  const Matrix& design() const noexcept { return design_; }

  Vector smooth(std::span<const double> values) const;
  // Each row of `values` (N x J) is smoothed independently; result N x K.
  Matrix smooth_rows(const Matrix& values) const;
  // Evaluate coefficient rows (N x K) on the grid; result N x J.
  Matrix evaluate_rows(const Matrix& coefficients) const;

 private:
  BasisSpec spec_;
  std::vector<double> grid_;
  Matrix design_;
  Matrix projector_;  // K x J
};

Vector smooth(const BasisSpec& spec, std::span<const double> grid,
              std::span<const double> values);

// Validates a strictly increasing grid inside `domain`.
void check_grid(const Domain& domain, std::span<const double> grid);

// n equally spaced points covering [lo, hi] including both ends.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace ifr
