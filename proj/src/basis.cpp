#include "ifr/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ifr/error.hpp"

namespace ifr {

BasisSpec BasisSpec::clamped(Domain domain, int num_basis, int order) {
  if (order < 1) fail(ErrorCategory::kDomain, "basis order must be >= 1");
  if (num_basis < order) {
    fail(ErrorCategory::kDomain, "basis count must be >= order");
  }
  if (!(domain.lo < domain.hi) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
    fail(ErrorCategory::kDomain, "basis domain must be a finite interval with lo < hi");
  }
  const int interior = num_basis - order;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(num_basis + order));
  knots.insert(knots.end(), static_cast<std::size_t>(order), domain.lo);
  for (int k = 1; k <= interior; ++k) {
    knots.push_back(domain.lo + domain.length() * k / (interior + 1));
  }
  knots.insert(knots.end(), static_cast<std::size_t>(order), domain.hi);
  return BasisSpec(order, num_basis, domain, std::move(knots));
}

BasisSpec BasisSpec::from_knots(int order, std::vector<double> knots) {
  if (order < 1) fail(ErrorCategory::kDomain, "basis order must be >= 1");
  const int n = static_cast<int>(knots.size()) - order;
  if (n < order) fail(ErrorCategory::kDomain, "knot vector too short for order");
  if (!std::is_sorted(knots.begin(), knots.end())) {
    fail(ErrorCategory::kDomain, "knots must be nondecreasing");
  }
  const Domain domain{knots.front(), knots.back()};
  if (!(domain.lo < domain.hi)) fail(ErrorCategory::kDomain, "degenerate knot range");
  for (int k = 0; k < order; ++k) {
    if (knots[k] != domain.lo || knots[knots.size() - 1 - k] != domain.hi) {
      fail(ErrorCategory::kDomain, "knot vector is not clamped");
    }
  }
  // Interior multiplicity above `order` would disconnect the basis.
  for (std::size_t i = 0; i + order < knots.size(); ++i) {
    if (knots[i] == knots[i + order] && knots[i] != domain.lo && knots[i] != domain.hi) {
      fail(ErrorCategory::kDomain, "interior knot multiplicity exceeds order");
    }
  }
  return BasisSpec(order, n, domain, std::move(knots));
}

std::vector<double> BasisSpec::breakpoints() const {
  std::vector<double> out(knots_.begin(), knots_.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Index i of the knot span [knots[i], knots[i+1]) holding t, restricted to
// the spans carrying the basis (degree <= i <= K - 1).
int find_span(const BasisSpec& spec, double t) {
  const auto& u = spec.knots();
  const int p = spec.degree();
  const int last = spec.num_basis() - 1;
  if (t >= u[static_cast<std::size_t>(last + 1)]) return last;
  const auto it = std::upper_bound(u.begin() + p, u.begin() + last + 1, t);
  return std::clamp(static_cast<int>(it - u.begin()) - 1, p, last);
}

// The `order` nonzero basis values on span i (Cox-de Boor triangle).
void nonzero_basis(const BasisSpec& spec, int span, double t, std::vector<double>& out) {
  const auto& u = spec.knots();
  const int p = spec.degree();
  std::vector<double> left(p + 1), right(p + 1);
  out.assign(p + 1, 0.0);
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - u[span + 1 - j];
    right[j] = u[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
}

void require_in_domain(const BasisSpec& spec, double t) {
  if (!spec.domain().contains(t)) {
    std::ostringstream os;
    os << "evaluation point " << t << " outside basis domain [" << spec.domain().lo << ", "
       << spec.domain().hi << "]";
    fail(ErrorCategory::kDomain, os.str());
  }
}

}  // namespace

Vector evaluate_basis(const BasisSpec& spec, double t) {
  require_in_domain(spec, t);
  Vector out = Vector::Zero(spec.num_basis());
  const int span = find_span(spec, t);
  std::vector<double> local;
  nonzero_basis(spec, span, t, local);
  const int first = span - spec.degree();
  for (int r = 0; r <= spec.degree(); ++r) out(first + r) = local[r];
  return out;
}

Matrix basis_matrix(const BasisSpec& spec, std::span<const double> grid) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(grid.size()), spec.num_basis());
  std::vector<double> local;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    require_in_domain(spec, grid[j]);
    const int span = find_span(spec, grid[j]);
    nonzero_basis(spec, span, grid[j], local);
    const int first = span - spec.degree();
    for (int r = 0; r <= spec.degree(); ++r) {
      out(static_cast<Eigen::Index>(j), first + r) = local[r];
    }
  }
  return out;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) fail(ErrorCategory::kDomain, "quadrature needs at least one node");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix.
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k - 1, k) = b;
    jacobi(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights[k] = 2.0 * v0 * v0;
  }
  return rule;
}

Matrix cross_gram(const BasisSpec& row_spec, const BasisSpec& col_spec) {
  if (!(row_spec.domain() == col_spec.domain())) {
    fail(ErrorCategory::kDimension, "cross_gram: bases live on different domains");
  }
  std::vector<double> breaks = row_spec.breakpoints();
  const auto other = col_spec.breakpoints();
  breaks.insert(breaks.end(), other.begin(), other.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Product degree d1 + d2 needs ceil((d1 + d2 + 1) / 2) nodes.
  const int nodes = (row_spec.degree() + col_spec.degree() + 2) / 2;
  const QuadratureRule rule = gauss_legendre(nodes);

  Matrix out = Matrix::Zero(row_spec.num_basis(), col_spec.num_basis());
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int q = 0; q < nodes; ++q) {
      const double t = mid + half * rule.nodes[q];
      const Vector phi = evaluate_basis(row_spec, t);
      const Vector psi = evaluate_basis(col_spec, t);
      out.noalias() += (half * rule.weights[q]) * phi * psi.transpose();
    }
  }
  return out;
}

Matrix gram_matrix(const BasisSpec& spec) {
  Matrix g = cross_gram(spec, spec);
  return 0.5 * (g + g.transpose());
}

void check_grid(const Domain& domain, std::span<const double> grid) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!domain.contains(grid[j])) {
      std::ostringstream os;
      os << "grid point " << j << " (" << grid[j] << ") outside domain [" << domain.lo << ", "
         << domain.hi << "]";
      fail(ErrorCategory::kDomain, os.str());
    }
    if (j > 0 && !(grid[j] > grid[j - 1])) {
      std::ostringstream os;
      os << "grid not strictly increasing at index " << j;
      fail(ErrorCategory::kValidation, os.str());
    }
  }
}

Smoother::Smoother(BasisSpec spec, std::vector<double> grid)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  if (grid_.size() < static_cast<std::size_t>(spec_.num_basis())) {
    std::ostringstream os;
    os << "smoothing is under-determined: " << grid_.size() << " grid points for "
       << spec_.num_basis() << " basis functions";
    fail(ErrorCategory::kDimension, os.str());
  }
  check_grid(spec_.domain(), grid_);
  design_ = basis_matrix(spec_, grid_);
  projector_ = pseudo_inverse(design_);
}

Vector Smoother::smooth(std::span<const double> values) const {
  if (values.size() != grid_.size()) {
    fail(ErrorCategory::kDimension, "smooth: value count differs from grid size");
  }
  const Eigen::Map<const Vector> v(values.data(), static_cast<Eigen::Index>(values.size()));
  return projector_ * v;
}

Matrix Smoother::smooth_rows(const Matrix& values) const {
  if (values.cols() != static_cast<Eigen::Index>(grid_.size())) {
    fail(ErrorCategory::kDimension, "smooth_rows: column count differs from grid size");
  }
  return values * projector_.transpose();
}

Matrix Smoother::evaluate_rows(const Matrix& coefficients) const {
  if (coefficients.cols() != spec_.num_basis()) {
    fail(ErrorCategory::kDimension, "evaluate_rows: coefficient width differs from basis size");
  }
  return coefficients * design_.transpose();
}

Vector smooth(const BasisSpec& spec, std::span<const double> grid,
              std::span<const double> values) {
  return Smoother(spec, {grid.begin(), grid.end()}).smooth(values);
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) fail(ErrorCategory::kDomain, "linspace needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) out[j] = lo + (hi - lo) * j / (n - 1);
  out.back() = hi;
  return out;
}

}  // namespace ifr
