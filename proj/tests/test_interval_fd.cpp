#include <doctest.h>

#include <algorithm>
#include <random>

#include "ifr/error.hpp"
#include "ifr/interval_fd.hpp"

using namespace ifr;

namespace {

const BasisSpec kSpec = BasisSpec::clamped({0.0, 1.0}, 8, 4);
const std::vector<double> kGrid = linspace(0.0, 1.0, 60);

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> z;
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

}  // namespace

TEST_CASE("from_discrete") {
  SUBCASE("degenerate intervals") {
    Rng rng(1);
    const Matrix v = random_matrix(rng, 4, 60);
    const auto ds = IntervalFunctionalDataset::from_discrete(v, v, kGrid, kSpec);
    CHECK((ds.center().coefficients() - ds.lower().coefficients()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ds.range().coefficients().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("constant limits") {
    const Matrix lo = Matrix::Constant(3, 60, 1.0);
    const Matrix hi = Matrix::Constant(3, 60, 3.0);
    const auto ds = IntervalFunctionalDataset::from_discrete(lo, hi, kGrid, kSpec);
    CHECK((ds.center().coefficients().array() - 2.0).abs().maxCoeff() < 1e-12);
    CHECK((ds.range().coefficients().array() - 1.0).abs().maxCoeff() < 1e-12);
  }

  SUBCASE("representable curves round trip") {
    Rng rng(2);
    const Matrix phi = basis_matrix(kSpec, kGrid);
    const Matrix c_lo = random_matrix(rng, 5, 8);
    const Matrix c_hi = c_lo + random_matrix(rng, 5, 8).cwiseAbs();
    const Matrix lo = c_lo * phi.transpose();
    const Matrix hi = c_hi * phi.transpose();
    // Nonnegative coefficient gaps give nonnegative value gaps by positivity.
    const auto ds = IntervalFunctionalDataset::from_discrete(lo, hi, kGrid, kSpec);
    CHECK((ds.lower_values() - lo).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ds.upper_values() - hi).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("inverted cell is reported") {
    Matrix lo = Matrix::Zero(3, 60);
    Matrix hi = Matrix::Ones(3, 60);
    lo(2, 17) = 1.5;
    try {
      IntervalFunctionalDataset::from_discrete(lo, hi, kGrid, kSpec);
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kValidation);
      const std::string what = e.what();
      CHECK(what.find("sample 2") != std::string::npos);
      CHECK(what.find("grid point 17") != std::string::npos);
    }
  }

  SUBCASE("shape errors") {
    CHECK_THROWS_AS(IntervalFunctionalDataset::from_discrete(Matrix::Zero(3, 60), Matrix::Zero(2, 60),
                                                             kGrid, kSpec),
                    Error);
    CHECK_THROWS_AS(IntervalFunctionalDataset::from_discrete(Matrix::Zero(3, 5), Matrix::Zero(3, 5),
                                                             linspace(0, 1, 5), kSpec),
                    Error);
  }
}

TEST_CASE("center and range curves") {
  Rng rng(3);
  const Vector c = random_matrix(rng, 8, 1);
  const IntervalFunctionalSample sym{{kSpec, -c}, {kSpec, c}};
  CHECK(center_curve(sym).coefficients.cwiseAbs().maxCoeff() == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    const Vector lo = random_matrix(rng, 8, 1);
    const Vector hi = lo + random_matrix(rng, 8, 1).cwiseAbs();
    const IntervalFunctionalSample s{{kSpec, lo}, {kSpec, hi}};
    const Vector cc = center_curve(s).coefficients;
    const Vector rr = range_curve(s).coefficients;
    CHECK((cc + rr - hi).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((cc - rr - lo).cwiseAbs().maxCoeff() < 1e-14);
    const Vector oracle = 0.5 * (eval_on_grid(s.lower, kGrid) + eval_on_grid(s.upper, kGrid));
    CHECK((eval_on_grid(center_curve(s), kGrid) - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }

  CHECK_THROWS_AS(IntervalFunctionalSample({kSpec, c}, {BasisSpec::clamped({0, 1}, 8, 3), c}), Error);
}

TEST_CASE("subset keeps requested rows in order") {
  Rng rng(4);
  const Matrix lo = random_matrix(rng, 6, 8);
  const Matrix hi = lo.array() + 1.0;
  const IntervalFunctionalDataset ds(kSpec, kGrid, lo, hi);
  const auto sub = ds.subset({4, 1});
  REQUIRE(sub.size() == 2);
  CHECK(sub.lower_coefficients().row(0) == lo.row(4));
  CHECK(sub.upper_coefficients().row(1) == hi.row(1));
  CHECK_THROWS_AS(ds.subset({6}), Error);
}

TEST_CASE("enforce_ordering") {
  Rng rng(5);
  const Matrix a = random_matrix(rng, 7, 30);
  const Matrix b = a.array() + 0.5;

  const auto ordered = enforce_ordering(a, b);
  CHECK(ordered.lower == a);
  CHECK(ordered.upper == b);
  CHECK(ordered.inversions == 0);

  const auto swapped = enforce_ordering(b, a);
  CHECK(swapped.lower == a);
  CHECK(swapped.upper == b);
  CHECK(swapped.inversions == 7 * 30);

  const Matrix x = random_matrix(rng, 7, 30);
  const Matrix y = random_matrix(rng, 7, 30);
  const auto r = enforce_ordering(x, y);
  Eigen::Index crossings = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      CHECK(r.lower(i, j) <= r.upper(i, j));
      CHECK(r.lower(i, j) == std::min(x(i, j), y(i, j)));
      CHECK(r.upper(i, j) == std::max(x(i, j), y(i, j)));
      crossings += x(i, j) > y(i, j);
    }
  }
  CHECK(r.inversions == crossings);

  const auto again = enforce_ordering(r.lower, r.upper);
  CHECK(again.lower == r.lower);
  CHECK(again.upper == r.upper);
  CHECK(again.inversions == 0);

  CHECK_THROWS_AS(enforce_ordering(Matrix::Zero(2, 3), Matrix::Zero(3, 2)), Error);
}
