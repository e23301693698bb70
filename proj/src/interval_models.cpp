#include "ifr/interval_models.hpp"

#include <sstream>

#include "ifr/error.hpp"

namespace ifr {

std::string_view model_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::kFlm: return "flm";
    case ModelKind::kCm: return "cm";
    case ModelKind::kCrm: return "crm";
    case ModelKind::kBcrm: return "bcrm";
    case ModelKind::kMcm: return "mcm";
  }
  return "?";
}

ModelKind parse_model(std::string_view name) {
  for (ModelKind k : kAllModels) {
    if (model_name(k) == name) return k;
  }
  fail(ErrorCategory::kUsage, "unknown model '" + std::string(name) + "'");
}

ComponentMeans ComponentMeans::of(const IntervalFunctionalDataset& ds) {
  return {mean_function(ds.lower()), mean_function(ds.upper()), mean_function(ds.center()),
          mean_function(ds.range())};
}

namespace {

using DatasetList = std::vector<FunctionalDataset>;

enum class Component { kLower, kUpper, kCenter, kRange };

DatasetList component(std::span<const IntervalFunctionalDataset> x, Component c) {
  DatasetList out;
  out.reserve(x.size());
  for (const auto& ds : x) {
    switch (c) {
      case Component::kLower: out.push_back(ds.lower()); break;
      case Component::kUpper: out.push_back(ds.upper()); break;
      case Component::kCenter: out.push_back(ds.center()); break;
      case Component::kRange: out.push_back(ds.range()); break;
    }
  }
  return out;
}

const FunctionalSample& pick(const ComponentMeans& m, Component c) {
  switch (c) {
    case Component::kLower: return m.lower;
    case Component::kUpper: return m.upper;
    case Component::kCenter: return m.center;
    case Component::kRange: return m.range;
  }
  return m.center;
}

std::vector<FunctionalSample> component_means(const IntervalFitResult& f, Component c) {
  std::vector<FunctionalSample> out;
  for (const auto& m : f.predictor_means) out.push_back(pick(m, c));
  return out;
}

void check_inputs(const IntervalFunctionalDataset& y, std::span<const IntervalFunctionalDataset> x) {
  if (x.empty()) fail(ErrorCategory::kValidation, "at least one interval predictor is required");
  if (y.size() == 0) fail(ErrorCategory::kValidation, "response dataset is empty");
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (x[m].size() != y.size()) {
      std::ostringstream os;
      os << "predictor " << m << " has " << x[m].size() << " samples, response has " << y.size();
      fail(ErrorCategory::kDimension, os.str());
    }
  }
}

// One MCM replicate: curves drawn pointwise-uniformly inside every interval,
// smoothed back to the common basis, then a centered ML fit.
Matrix mcm_replicate(Rng& rng, const Matrix& y_lo, const Matrix& y_up, const Smoother& y_smoother,
                     const std::vector<Matrix>& x_lo, const std::vector<Matrix>& x_up,
                     const std::vector<Smoother>& x_smoothers, const std::vector<Matrix>& grams) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const Matrix& lo, const Matrix& up) {
    Matrix w(lo.rows(), lo.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = unit(rng);
    }
    return Matrix(lo.array() + w.array() * (up - lo).array());
  };
  const Matrix y_coef = y_smoother.smooth_rows(draw(y_lo, y_up));
  DatasetList x_star;
  for (std::size_t m = 0; m < x_lo.size(); ++m) {
    x_star.emplace_back(x_smoothers[m].spec(), x_smoothers[m].smooth_rows(draw(x_lo[m], x_up[m])));
  }
  const FofDesign design = build_design(x_star, grams);
  const Matrix c = y_coef.rowwise() - y_coef.colwise().mean();
  return estimate_ml(design.z, c).b_hat;
}

Matrix apply(const Matrix& z, const Matrix& b, const FunctionalSample& mean) {
  Matrix coef = z * b;
  coef.rowwise() += mean.coefficients.transpose();
  return coef;
}

}  // namespace

IntervalFitResult fit(ModelKind kind, const IntervalFunctionalDataset& y,
                      std::span<const IntervalFunctionalDataset> x, const ModelConfig& config) {
  check_inputs(y, x);
  if (kind == ModelKind::kMcm && config.mcm_replicates < 2) {
    fail(ErrorCategory::kUsage, "MCM needs at least two replicates");
  }

  IntervalFitResult out{kind,          {}, {}, std::nullopt, y.basis(), ComponentMeans::of(y),
                        {},            {}, {}};
  for (const auto& ds : x) {
    out.predictor_means.push_back(ComponentMeans::of(ds));
    out.predictor_bases.push_back(ds.basis());
    out.grams.push_back(gram_matrix(ds.basis()));
  }

  auto fit_on = [&](const FunctionalDataset& response, const DatasetList& predictors,
                    std::vector<Matrix> grams) {
    return fit_ml(build_design(predictors, std::move(grams)), response);
  };

  switch (kind) {
    case ModelKind::kFlm:
      out.fits.push_back(fit_on(y.lower(), component(x, Component::kLower), out.grams));
      out.fits.push_back(fit_on(y.upper(), component(x, Component::kUpper), out.grams));
      break;
    case ModelKind::kCm:
      out.fits.push_back(fit_on(y.center(), component(x, Component::kCenter), out.grams));
      break;
    case ModelKind::kCrm:
      out.fits.push_back(fit_on(y.center(), component(x, Component::kCenter), out.grams));
      out.fits.push_back(fit_on(y.range(), component(x, Component::kRange), out.grams));
      break;
    case ModelKind::kBcrm: {
      DatasetList both = component(x, Component::kCenter);
      const DatasetList ranges = component(x, Component::kRange);
      both.insert(both.end(), ranges.begin(), ranges.end());
      std::vector<Matrix> grams = out.grams;
      grams.insert(grams.end(), out.grams.begin(), out.grams.end());
      out.fits.push_back(fit_on(y.center(), both, grams));
      out.fits.push_back(fit_on(y.range(), both, grams));
      break;
    }
    case ModelKind::kMcm: {
      const Smoother y_smoother(y.basis(), y.grid());
      const Matrix y_lo = y.lower_values();
      const Matrix y_up = y.upper_values();
      std::vector<Smoother> x_smoothers;
      std::vector<Matrix> x_lo, x_up;
      for (const auto& ds : x) {
        x_smoothers.emplace_back(ds.basis(), ds.grid());
        x_lo.push_back(ds.lower_values());
        x_up.push_back(ds.upper_values());
      }
      Matrix sum;
      for (int b = 0; b < config.mcm_replicates; ++b) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(b)));
        out.mcm_replicates.push_back(
            mcm_replicate(rng, y_lo, y_up, y_smoother, x_lo, x_up, x_smoothers, out.grams));
        if (b == 0) {
          sum = out.mcm_replicates.back();
        } else {
          sum += out.mcm_replicates.back();
        }
      }
      out.mcm_b_bar = sum / static_cast<double>(config.mcm_replicates);
      break;
    }
  }
  return out;
}

namespace {

void check_predictors(const IntervalFitResult& f, std::span<const IntervalFunctionalDataset> x) {
  if (x.size() != f.predictor_bases.size()) {
    fail(ErrorCategory::kDimension, "predictor count differs from the fitted model");
  }
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (!(x[m].basis() == f.predictor_bases[m])) {
      std::ostringstream os;
      os << "predictor " << m << " basis differs from the training basis";
      fail(ErrorCategory::kDimension, os.str());
    }
    if (x[m].size() != x.front().size()) {
      fail(ErrorCategory::kDimension, "predictors have different sample counts");
    }
  }
}

struct LimitCoefficients {
  Matrix lower;
  Matrix upper;
};

LimitCoefficients limit_coefficients(const IntervalFitResult& f,
                                     std::span<const IntervalFunctionalDataset> x) {
  check_predictors(f, x);
  const auto& ym = f.response_means;
  switch (f.kind) {
    case ModelKind::kFlm:
      return {predict(f.fits[0], component(x, Component::kLower)).coefficients(),
              predict(f.fits[1], component(x, Component::kUpper)).coefficients()};
    case ModelKind::kCm:
    case ModelKind::kMcm: {
      const Matrix& b = f.kind == ModelKind::kCm ? f.fits[0].b_hat : *f.mcm_b_bar;
      const Matrix z_lo = design_matrix(component(x, Component::kLower),
                                        component_means(f, Component::kLower), f.grams);
      const Matrix z_up = design_matrix(component(x, Component::kUpper),
                                        component_means(f, Component::kUpper), f.grams);
      return {apply(z_lo, b, ym.lower), apply(z_up, b, ym.upper)};
    }
    case ModelKind::kCrm: {
      const Matrix c = predict(f.fits[0], component(x, Component::kCenter)).coefficients();
      const Matrix r = predict(f.fits[1], component(x, Component::kRange)).coefficients();
      return {c - r, c + r};
    }
    case ModelKind::kBcrm: {
      DatasetList both = component(x, Component::kCenter);
      const DatasetList ranges = component(x, Component::kRange);
      both.insert(both.end(), ranges.begin(), ranges.end());
      const Matrix c = predict(f.fits[0], both).coefficients();
      const Matrix r = predict(f.fits[1], both).coefficients();
      return {c - r, c + r};
    }
  }
  fail(ErrorCategory::kUsage, "unknown model kind");
}

}  // namespace

LimitPrediction predict_limits(const IntervalFitResult& f,
                               std::span<const IntervalFunctionalDataset> x_new,
                               std::span<const double> grid) {
  const LimitCoefficients coef = limit_coefficients(f, x_new);
  const Matrix phi_t = basis_matrix(f.response_basis, grid).transpose();
  OrderedLimits ordered = enforce_ordering(coef.lower * phi_t, coef.upper * phi_t);
  return {std::move(ordered.lower), std::move(ordered.upper), ordered.inversions};
}

ResidualPool mcm_residual_pool(const IntervalFitResult& f, const IntervalFunctionalDataset& y_train,
                               std::span<const IntervalFunctionalDataset> x_train,
                               std::span<const double> grid) {
  if (f.kind != ModelKind::kMcm) fail(ErrorCategory::kUsage, "residual pool needs an MCM fit");
  if (!(y_train.basis() == f.response_basis)) {
    fail(ErrorCategory::kDimension, "training response basis differs from the fitted model");
  }
  const LimitPrediction pred = predict_limits(f, x_train, grid);
  if (pred.lower.rows() != y_train.size()) {
    fail(ErrorCategory::kDimension, "response and predictor sample counts differ");
  }
  const Matrix phi_t = basis_matrix(f.response_basis, grid).transpose();
  return {y_train.lower_coefficients() * phi_t - pred.lower,
          y_train.upper_coefficients() * phi_t - pred.upper};
}

PredictionBand mcm_prediction_band(const IntervalFitResult& f,
                                   std::span<const IntervalFunctionalDataset> x_new,
                                   const ResidualPool& pool, double alpha,
                                   std::span<const double> grid, std::uint64_t seed) {
  if (f.kind != ModelKind::kMcm) fail(ErrorCategory::kUsage, "prediction bands need an MCM fit");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(ErrorCategory::kDomain, "alpha must lie in (0, 1]");
  }
  const Eigen::Index j_count = static_cast<Eigen::Index>(grid.size());
  if (pool.lower.rows() == 0 || pool.upper.rows() != pool.lower.rows()) {
    fail(ErrorCategory::kValidation, "residual pool is empty or unbalanced");
  }
  if (pool.lower.cols() != j_count || pool.upper.cols() != j_count) {
    fail(ErrorCategory::kDimension, "residual curves do not match the grid");
  }
  check_predictors(f, x_new);

  const Matrix phi_t = basis_matrix(f.response_basis, grid).transpose();
  const Matrix z_lo = design_matrix(component(x_new, Component::kLower),
                                    component_means(f, Component::kLower), f.grams);
  const Matrix z_up = design_matrix(component(x_new, Component::kUpper),
                                    component_means(f, Component::kUpper), f.grams);
  const auto& ym = f.response_means;
  const Eigen::Index n = z_lo.rows();
  const std::size_t reps = f.mcm_replicates.size();

  Rng rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick_row(0, pool.lower.rows() - 1);
  std::vector<Matrix> lo_reps, up_reps;
  lo_reps.reserve(reps);
  up_reps.reserve(reps);
  for (const Matrix& b : f.mcm_replicates) {
    Matrix lo = apply(z_lo, b, ym.lower) * phi_t;
    Matrix up = apply(z_up, b, ym.upper) * phi_t;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index r = pick_row(rng);
      lo.row(i) += pool.lower.row(r);
      up.row(i) += pool.upper.row(r);
    }
    lo_reps.push_back(std::move(lo));
    up_reps.push_back(std::move(up));
  }

  PredictionBand band{{grid.begin(), grid.end()}, alpha,           Matrix(n, j_count),
                      Matrix(n, j_count),         Matrix(n, j_count), Matrix(n, j_count)};
  const double p_lo = alpha / 2.0;
  const double p_hi = 1.0 - alpha / 2.0;
  std::vector<double> buf(reps);
  auto fill = [&](const std::vector<Matrix>& src, Eigen::Index i, Eigen::Index j) {
    for (std::size_t b = 0; b < reps; ++b) buf[b] = src[b](i, j);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < j_count; ++j) {
      fill(lo_reps, i, j);
      band.lower_lo(i, j) = quantile_inplace(buf, p_lo);
      band.lower_hi(i, j) = quantile_inplace(buf, p_hi);
      fill(up_reps, i, j);
      band.upper_lo(i, j) = quantile_inplace(buf, p_lo);
      band.upper_hi(i, j) = quantile_inplace(buf, p_hi);
    }
  }
  return band;
}

}  // namespace ifr
