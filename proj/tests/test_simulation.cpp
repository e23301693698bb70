#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ifr/error.hpp"
#include "ifr/simulation.hpp"

using namespace ifr;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.n = 40;
  c.grid_size = 30;
  c.mc = 2;
  c.mcm_replicates = 4;
  c.seed = 99;
  return c;
}

// Closed-form integral over s in [0, 1] of 10 beta_m(s, t).
double analytic_constant_response(int m, double t) {
  const double pi = std::numbers::pi;
  const double g = std::exp(-5.0 * (t - 0.5) * (t - 0.5));
  switch (m) {
    case 1: return 10.0 * (t - 0.5) * (t - 0.5) / 3.0;
    case 2: return 10.0 * g * 0.5 * std::sqrt(pi / 3.0) * std::erf(std::sqrt(3.0));
    default: {
      const double r5 = std::sqrt(5.0);
      const double near = std::sqrt(pi / 5.0) * std::erf(0.5 * r5);
      const double far = 0.5 * std::sqrt(pi / 5.0) * (std::erf(1.5 * r5) - std::erf(0.5 * r5));
      return 10.0 * g * (near + 8.0 * far);
    }
  }
}

}  // namespace

TEST_CASE("standard cases") {
  const SimCase c3 = SimCase::standard(3);
  CHECK(c3.a == 3.0);
  CHECK(c3.b == 5.0);
  CHECK(c3.c == 5.0);
  CHECK(c3.d == 8.0);
  const SimCase c4 = SimCase::standard(4);
  CHECK(c4.a == 8.0);
  CHECK(c4.b == 20.0);
  CHECK(c4.c == 6.0);
  CHECK(c4.d == 15.0);
  CHECK_THROWS_AS(SimCase::standard(5), Error);
}

TEST_CASE("squared-exponential covariance") {
  const auto grid = linspace(0.0, 1.0, 100);
  const Matrix k = se_covariance(grid);
  CHECK((k.diagonal().array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const GaussianProcessSampler gp(grid);
  CHECK(gp.jitter() >= 1e-10);
  CHECK(gp.jitter() <= 1e-6);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gp.covariance() +
                                            gp.jitter() * Matrix::Identity(100, 100));
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("Gaussian process moments") {
  const auto grid = linspace(0.0, 1.0, 21);  // contains 0.10 and 0.15
  const GaussianProcessSampler gp(grid);
  Rng rng(2024);

  const Matrix draws = gp.sample_rows(rng, 5000);
  const double mean_at = draws.col(8).head(2000).mean();
  CHECK(std::abs(mean_at) < 0.1);

  const Vector a = draws.col(2).array() - draws.col(2).mean();
  const Vector b = draws.col(3).array() - draws.col(3).mean();
  const double cov = a.dot(b) / (draws.rows() - 1);
  CHECK(std::abs(cov - std::exp(-0.25)) < 0.05);

  CHECK(gp_sample(grid, 5) == gp_sample(grid, 5));
  CHECK(gp_sample(grid, 5) != gp_sample(grid, 6));
}

TEST_CASE("generating surfaces") {
  for (double t : {0.0, 0.3, 1.0}) CHECK(true_beta(1, 1.0, t) == 0.0);
  for (double s : {0.0, 0.3, 1.0}) CHECK(true_beta(1, s, 0.5) == 0.0);
  CHECK(true_beta(2, 1.0, 0.5) == 1.0);
  CHECK(true_beta(3, 0.5, 0.5) == doctest::Approx(1.0 + 8.0 * std::exp(-5.0)).epsilon(1e-15));
  CHECK(true_beta(3, 0.5, 0.5) == doctest::Approx(1.0539).epsilon(1e-4));
  CHECK_THROWS_AS(true_beta(0, 0.5, 0.5), Error);
  CHECK_THROWS_AS(true_beta(4, 0.5, 0.5), Error);
}

TEST_CASE("Riemann rule on constant predictors matches the analytic response") {
  // The generator integrates with this rule; check it against closed forms
  // for X = 10 (V = 0).
  const auto grid = linspace(0.0, 1.0, 100);
  const double dt = grid[1] - grid[0];
  for (int j = 0; j < 100; j += 7) {
    double riemann = 0.0, analytic = 0.0;
    for (int m = 1; m <= 3; ++m) {
      for (int k = 0; k + 1 < 100; ++k) riemann += 10.0 * true_beta(m, grid[k], grid[j]) * dt;
      analytic += analytic_constant_response(m, grid[j]);
    }
    // Left-endpoint error is about dt / 2 times the boundary jump of the integrand.
    CHECK(std::abs(riemann - analytic) < 0.5);
    CHECK(std::abs(riemann - analytic) / analytic < 0.05);
  }
}

TEST_CASE("generate") {
  SimConfig config = small_config();
  config.response_noise_variance = 0.0;
  const SimCase sc = SimCase::standard(2);
  const SimulatedData d = generate(config, sc, 17);
  const Eigen::Index n = config.n, j = config.grid_size;
  const double dt = d.grid[1] - d.grid[0];

  REQUIRE(d.x.size() == 3u);
  CHECK(d.y.size() == n);
  CHECK(d.y.basis().num_basis() == 8);
  CHECK(d.y_center.rows() == n);
  CHECK(d.y_center.cols() == j);

  SUBCASE("noiseless response is the Riemann sum over the predictor centers") {
    Matrix expected = Matrix::Zero(n, j);
    for (int m = 0; m < 3; ++m)
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index t = 0; t < j; ++t)
          for (Eigen::Index s = 0; s + 1 < j; ++s)
            expected(i, t) += d.x_center[m](i, s) * true_beta(m + 1, d.grid[s], d.grid[t]) * dt;
    CHECK((d.y_center - expected).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("limits recompose the range") {
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(d.y_offset(i) >= sc.a);
      CHECK(d.y_offset(i) <= sc.b);
      const Vector width = (d.y_upper.row(i) - d.y_lower.row(i)).transpose();
      const Vector range = d.y_center.row(i).transpose().array() + d.y_offset(i);
      CHECK((width - range).cwiseAbs().maxCoeff() < 1e-12);
      const Vector mid = 0.5 * (d.y_upper.row(i) + d.y_lower.row(i)).transpose();
      CHECK((mid - d.y_center.row(i).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (const auto& off : d.x_offset) {
      CHECK(off.minCoeff() >= sc.c);
      CHECK(off.maxCoeff() <= sc.d);
    }
  }

  SUBCASE("raw inversions are counted") {
    Eigen::Index count = (d.y_lower.array() > d.y_upper.array()).count();
    for (int m = 0; m < 3; ++m) count += (d.x_lower[m].array() > d.x_upper[m].array()).count();
    CHECK(d.raw_inversions == count);
  }

  SUBCASE("smoothed datasets come from the raw limits") {
    const Smoother sm(d.y.basis(), d.grid);
    CHECK((d.y.lower_coefficients() - sm.smooth_rows(d.y_lower)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d.x[1].upper_coefficients() - sm.smooth_rows(d.x_upper[1])).cwiseAbs().maxCoeff() <
          1e-12);
  }

  SUBCASE("deterministic in the seed") {
    const SimulatedData again = generate(config, sc, 17);
    CHECK(again.y_lower == d.y_lower);
    CHECK(again.x_upper[2] == d.x_upper[2]);
    CHECK(generate(config, sc, 18).y_lower != d.y_lower);
  }
}

TEST_CASE("metrics") {
  const auto grid = linspace(0.0, 1.0, 50);
  const Matrix truth = Matrix::Zero(3, 50);
  CHECK(amse(truth, Matrix::Ones(3, 50), grid) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix mixed = Matrix::Ones(3, 50);
  mixed.row(1) *= 3.0;
  CHECK(amse(truth, mixed, grid) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(amse(truth, Matrix::Ones(2, 50), grid), Error);

  Matrix lo = Matrix::Constant(2, 4, -1.0);
  Matrix hi = Matrix::Constant(2, 4, 1.0);
  Matrix t = Matrix::Zero(2, 4);
  t(0, 0) = 2.0;
  t(1, 3) = -1.0;  // on the boundary counts as covered
  CHECK(coverage(t, lo, hi) == doctest::Approx(7.0 / 8.0));
}

TEST_CASE("replicate seeds") {
  CHECK(replicate_seed(1, 1, 0) == replicate_seed(1, 1, 0));
  CHECK(replicate_seed(1, 1, 0) != replicate_seed(1, 1, 1));
  CHECK(replicate_seed(1, 1, 0) != replicate_seed(1, 2, 0));
  CHECK(replicate_seed(1, 1, 0) != replicate_seed(2, 1, 0));
}

TEST_CASE("run_study") {
  SimConfig config = small_config();
  const std::vector<SimCase> cases{SimCase::standard(1), SimCase::standard(3)};
  const std::vector<ModelKind> models{ModelKind::kFlm, ModelKind::kCm, ModelKind::kMcm};
  const MetricsReport two = run_study(config, cases, models, 1);

  REQUIRE(two.rows.size() == 2u * 2u * 3u);
  CHECK(two.rows[0].case_index == 1);
  CHECK(two.rows[0].replicate == 0);
  CHECK(two.rows[0].model == ModelKind::kFlm);
  CHECK(two.rows[11].case_index == 3);
  CHECK(two.rows[11].replicate == 1);
  CHECK(two.rows[11].model == ModelKind::kMcm);
  CHECK(two.raw_cells == 4 * 4 * 40 * 30);
  for (const auto& r : two.rows) {
    CHECK(r.amse_lower >= 0.0);
    CHECK(r.amse_upper >= 0.0);
    CHECK(r.cp_lower.has_value() == (r.model == ModelKind::kMcm));
    if (r.cp_lower) {
      CHECK(*r.cp_lower >= 0.0);
      CHECK(*r.cp_upper <= 1.0);
    }
  }

  SUBCASE("more replicates leave the earlier ones unchanged") {
    config.mc = 4;
    const MetricsReport four = run_study(config, cases, models, 1);
    REQUIRE(four.rows.size() == 24u);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(four.rows[k].amse_lower == two.rows[k].amse_lower);
      CHECK(four.rows[k].amse_upper == two.rows[k].amse_upper);
      CHECK(four.rows[k].cp_upper == two.rows[k].cp_upper);
    }
    // Case 3 starts after four case-1 replicates.
    CHECK(four.rows[12].amse_lower == two.rows[6].amse_lower);
  }

  SUBCASE("thread count does not change results") {
    const MetricsReport threaded = run_study(config, cases, models, 3);
    REQUIRE(threaded.rows.size() == two.rows.size());
    for (std::size_t k = 0; k < two.rows.size(); ++k) {
      CHECK(threaded.rows[k].amse_lower == two.rows[k].amse_lower);
      CHECK(threaded.rows[k].cp_lower == two.rows[k].cp_lower);
    }
    CHECK(threaded.raw_inversions == two.raw_inversions);
  }

  SUBCASE("summary") {
    const auto summary = summarize(two);
    // (flm, cm) x 2 cases x 2 metrics + mcm x 2 cases x 4 metrics
    CHECK(summary.size() == 16u);
    CHECK(summary[0].model == "flm");
    CHECK(summary[0].case_index == 1);
    CHECK(summary[0].metric == "amse_lower");
    CHECK(summary[0].n_replicates == 2u);
    const double a = two.rows[0].amse_lower, b = two.rows[3].amse_lower;
    CHECK(summary[0].median == doctest::Approx(0.5 * (a + b)));
    CHECK(summary[0].q1 == doctest::Approx(std::min(a, b) + 0.25 * std::abs(a - b)));
  }

  SUBCASE("invalid configuration") {
    config.alpha = 1.0;
    CHECK_THROWS_AS(run_study(config, cases, models), Error);
    config = small_config();
    config.grid_size = 5;
    CHECK_THROWS_AS(run_study(config, cases, models), Error);
    config = small_config();
    CHECK_THROWS_AS(run_study(config, cases, std::vector<ModelKind>{}), Error);
  }
}
