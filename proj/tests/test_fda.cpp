#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ifr/error.hpp"
#include "ifr/fda.hpp"

using namespace ifr;

namespace {

const BasisSpec kSpec = BasisSpec::clamped({0.0, 1.0}, 8, 4);

Vector random_vector(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> z;
  Vector v(n);
  for (auto& x : v) x = z(rng);
  return v;
}

}  // namespace

TEST_CASE("dataset construction") {
  CHECK_THROWS_AS(FunctionalSample(kSpec, Vector::Zero(7)), Error);
  CHECK_THROWS_AS(FunctionalDataset(kSpec, Matrix::Zero(3, 9)), Error);
  std::vector<FunctionalSample> samples{{kSpec, Vector::Ones(8)}, {kSpec, Vector::Zero(8)}};
  const FunctionalDataset ds(samples);
  CHECK(ds.size() == 2);
  CHECK(ds.sample(0).coefficients == Vector::Ones(8));
  samples.emplace_back(BasisSpec::clamped({0.0, 1.0}, 8, 3), Vector::Zero(8));
  CHECK_THROWS_AS(FunctionalDataset{samples}, Error);
}

TEST_CASE("mean_function") {
  Rng rng(3);
  const Vector c = random_vector(rng, 8);

  SUBCASE("single sample") {
    const FunctionalDataset ds(kSpec, Matrix(c.transpose()));
    CHECK(mean_function(ds).coefficients == c);
  }
  SUBCASE("symmetric pair") {
    Matrix m(2, 8);
    m.row(0) = c.transpose();
    m.row(1) = -c.transpose();
    CHECK(mean_function(FunctionalDataset(kSpec, m)).coefficients.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("matches the average of evaluated curves") {
    Matrix m(3, 8);
    for (int i = 0; i < 3; ++i) m.row(i) = random_vector(rng, 8).transpose();
    const FunctionalDataset ds(kSpec, m);
    const auto grid = linspace(0.0, 1.0, 37);
    Vector avg = Vector::Zero(37);
    for (int i = 0; i < 3; ++i) avg += eval_on_grid(ds.sample(i), grid) / 3.0;
    CHECK((eval_on_grid(mean_function(ds), grid) - avg).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("empty dataset") {
    CHECK_THROWS_AS(mean_function(FunctionalDataset(kSpec, Matrix(0, 8))), Error);
  }
}

TEST_CASE("center") {
  Rng rng(4);
  Matrix m(10, 8);
  for (int i = 0; i < 10; ++i) m.row(i) = random_vector(rng, 8).transpose();
  const auto [centered, mean] = center(FunctionalDataset(kSpec, m));
  CHECK(centered.coefficients().colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(mean_function(centered).coefficients.norm() < 1e-12);
  CHECK((mean.coefficients - m.colwise().mean().transpose()).cwiseAbs().maxCoeff() < 1e-15);

  const auto [twice, mean2] = center(centered);
  CHECK((twice.coefficients() - centered.coefficients()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(mean2.coefficients.norm() < 1e-12);

  const Matrix same = Vector::Constant(8, 2.5).transpose().replicate(4, 1);
  CHECK(center(FunctionalDataset(kSpec, same)).first.coefficients().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(center(FunctionalDataset(kSpec, Matrix(0, 8))), Error);
}

TEST_CASE("eval_on_grid") {
  const auto grid = linspace(0.0, 1.0, 50);
  CHECK(eval_on_grid({kSpec, Vector::Zero(8)}, grid).cwiseAbs().maxCoeff() == 0.0);
  CHECK((eval_on_grid({kSpec, Vector::Ones(8)}, grid).array() - 1.0).abs().maxCoeff() < 1e-14);

  const BasisSpec cubic = BasisSpec::clamped({0.0, 1.0}, 4, 4);
  Vector e3 = Vector::Zero(4);
  e3(3) = 1.0;
  const std::vector<double> half{0.5};
  CHECK(eval_on_grid({cubic, e3}, half)(0) == doctest::Approx(0.125).epsilon(1e-15));

  const std::vector<double> outside{0.5, 1.2};
  CHECK_THROWS_AS(eval_on_grid({kSpec, Vector::Ones(8)}, outside), Error);

  Rng rng(5);
  const Vector c1 = random_vector(rng, 8);
  const Vector c2 = random_vector(rng, 8);
  const double a = 1.7, b = -0.3;
  const Vector lhs = eval_on_grid({kSpec, a * c1 + b * c2}, grid);
  const Vector rhs = a * eval_on_grid({kSpec, c1}, grid) + b * eval_on_grid({kSpec, c2}, grid);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("l2_distance") {
  const auto grid = linspace(0.0, 1.0, 100);
  Rng rng(6);
  const FunctionalSample f{kSpec, random_vector(rng, 8)};
  CHECK(l2_distance(f, f, grid) == 0.0);

  const FunctionalSample one{kSpec, Vector::Ones(8)};
  const FunctionalSample zero{kSpec, Vector::Zero(8)};
  CHECK(l2_distance(one, zero, grid) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> s(100), z(100, 0.0);
  for (int j = 0; j < 100; ++j) s[j] = std::sin(2.0 * std::numbers::pi * grid[j]);
  CHECK(std::abs(l2_distance_values(s, z, grid) - std::sqrt(0.5)) < 0.01);

  std::vector<double> uneven = grid;
  uneven[50] += 0.003;
  CHECK_THROWS_AS(l2_distance(one, zero, uneven), Error);
  CHECK_THROWS_AS(uniform_step(uneven), Error);

  SUBCASE("metric properties on random triples") {
    for (int trial = 0; trial < 200; ++trial) {
      const FunctionalSample a{kSpec, random_vector(rng, 8)};
      const FunctionalSample b{kSpec, random_vector(rng, 8)};
      const FunctionalSample c{kSpec, random_vector(rng, 8)};
      const double ab = l2_distance(a, b, grid);
      CHECK(std::abs(ab - l2_distance(b, a, grid)) < 1e-9);
      CHECK(l2_distance(a, c, grid) <= ab + l2_distance(b, c, grid) + 1e-9);
    }
  }
}
