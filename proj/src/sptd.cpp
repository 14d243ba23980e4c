#include <sparsetd/sptd.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include <sparsetd/errors.hpp>
#include <sparsetd/parallel.hpp>

namespace sparsetd {

std::vector<double> make_rho_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InputError("rho grid step must be positive");
  if (!(lo <= hi)) throw InputError("rho grid: minimum exceeds maximum");
  const auto count = static_cast<Index>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(count));
  for (Index i = 0; i < count; ++i) {
    grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e10) / 1e10);
  }
  validate_rho_grid(grid);
  return grid;
}

std::vector<double> default_rho_grid() { return make_rho_grid(0.01, 0.99, 0.01); }

std::vector<double> full_rho_grid() { return make_rho_grid(-0.99, 0.99, 0.01); }

void validate_rho_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InputError("rho grid is empty");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || std::abs(grid[i]) >= 1.0) {
      throw InputError("rho grid values must lie strictly inside (-1, 1)");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InputError("rho grid must be strictly increasing");
    }
  }
}

AggregatedData aggregate_inputs(const LowFreqSeries& y, const IndicatorPanel& x,
                                const AggregationScheme& scheme) {
  AggregationScheme effective = scheme;
  effective.n = y.size();
  validate(y);
  validate(x, effective);
  AggregatedData data;
  data.y = y.values;
  data.C = build_aggregation_matrix(effective);
  data.CX = data.C * x.values;
  data.m = effective.m();
  return data;
}

WhitenedProblem rotate(const AggregatedData& data, double rho) {
  const CovariancePair cov = ar1_covariance({rho, 1.0, data.m});
  const Whitener factor(aggregate_covariance(cov.V, data.C));
  return whiten(factor, data.y, data.CX);
}

BicScore bic_score(const WhitenedProblem& problem, const Vector& beta) {
  const Index n = problem.n();
  const Index k = static_cast<Index>(nonzero_indices(beta).size());
  if (k >= n) {
    std::ostringstream msg;
    msg << "BIC needs fewer nonzero coefficients than observations (K = " << k << ", n = " << n
        << ")";
    throw InputError(msg.str());
  }
  const double rss = residual_sum_of_squares(problem, beta);
  BicScore out;
  out.k = k;
  // An exact fit would send log(sigma2) to -inf; keep it finite so the
  // comparison still orders models.
  out.sigma2 = std::max(rss / static_cast<double>(n - k), std::numeric_limits<double>::min());
  out.log_likelihood = log_likelihood_from_rss(n, problem.log_det_s, rss, out.sigma2);
  out.bic = -2.0 * out.log_likelihood + std::log(static_cast<double>(n)) * static_cast<double>(k);
  return out;
}

namespace {

Index cutoff_size(double cutoff_fraction, Index n) {
  if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0)) {
    throw InputError("cut-off fraction must lie in (0, 1]");
  }
  return static_cast<Index>(std::floor(cutoff_fraction * static_cast<double>(n)));
}

bool same_score(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

SolutionPath path_for_selection(const WhitenedProblem& problem, double cutoff_fraction,
                                const std::vector<std::string>* names) {
  LarsOptions options;
  options.max_active = std::max<Index>(1, cutoff_size(cutoff_fraction, problem.n()));
  options.names = names;
  return lars_path(problem.y, problem.X, options);
}

PathSelection select_breakpoint(const WhitenedProblem& problem, const SolutionPath& path,
                                bool refit, double cutoff_fraction) {
  const Index n = problem.n();
  const Index limit = cutoff_size(cutoff_fraction, n);

  PathSelection best;
  best.beta = Vector::Zero(problem.p());
  for (size_t s = 0; s < path.steps.size(); ++s) {
    const PathStep& step = path.steps[s];
    if (static_cast<Index>(step.active_set.size()) >= limit) continue;

    Vector beta = step.beta;
    if (refit && !step.active_set.empty()) {
      GlsFit fit = gls_fit(problem, step.active_set);
      beta = std::move(fit.beta);
      for (auto& w : fit.warnings) best.warnings.push_back(std::move(w));
    }
    const BicScore score = bic_score(problem, beta);
    const bool better =
        best.step < 0 || (score.bic < best.score.bic && !same_score(score.bic, best.score.bic)) ||
        (same_score(score.bic, best.score.bic) && score.k < best.score.k);
    if (better) {
      best.beta = std::move(beta);
      best.lambda = step.lambda;
      best.score = score;
      best.step = static_cast<Index>(s);
    }
  }
  if (best.step < 0) {
    best.warnings.push_back("no lasso breakpoint below the BIC cut-off; returning the null model");
    best.score = bic_score(problem, best.beta);
    best.lambda = path.steps.empty() ? 0.0 : path.front().lambda;
  }
  return best;
}

RhoFit fit_for_rho(const AggregatedData& data, double rho, const SptdConfig& config,
                   const std::vector<std::string>* names) {
  const WhitenedProblem problem = rotate(data, rho);
  const SolutionPath path = path_for_selection(problem, config.cutoff_fraction, names);
  PathSelection sel = select_breakpoint(problem, path, config.refit, config.cutoff_fraction);

  RhoFit out;
  out.rho = rho;
  out.beta = std::move(sel.beta);
  out.lambda = sel.lambda;
  out.bic = sel.score.bic;
  out.sigma2 = sel.score.sigma2;
  out.log_likelihood = sel.score.log_likelihood;
  out.k = sel.score.k;
  out.warnings = std::move(sel.warnings);
  return out;
}

RhoFit fit_for_rho(const LowFreqSeries& y, const IndicatorPanel& x, double rho,
                   const SptdConfig& config) {
  return fit_for_rho(aggregate_inputs(y, x, config.scheme), rho, config, &x.names);
}

namespace {

void append_unique(Warnings& into, const Warnings& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

DisaggResult finish(const LowFreqSeries& y, const IndicatorPanel& x,
                    const AggregationScheme& scheme, const RhoFit& chosen) {
  AggregationScheme effective = scheme;
  effective.n = y.size();
  DisaggResult result;
  result.beta = chosen.beta;
  result.rho_hat = chosen.rho;
  result.sigma2_hat = chosen.sigma2;
  result.lambda_hat = chosen.lambda;
  result.lambda_penalty = 2.0 * chosen.lambda;
  result.bic = chosen.bic;
  result.log_likelihood = chosen.log_likelihood;
  result.active_set = nonzero_indices(chosen.beta);
  Disaggregation series = disaggregate(y, x, chosen.beta, {chosen.rho, 1.0, effective.m()},
                                       effective);
  result.zbar = std::move(series.zbar);
  result.z = std::move(series.z);
  return result;
}

}  // namespace

DisaggResult sptd_fit(const LowFreqSeries& y, const IndicatorPanel& x, const SptdConfig& config,
                      RhoProfile* profile) {
  if (y.size() < 4) throw InputError("sparse disaggregation needs at least 4 observations");
  validate_rho_grid(config.rho_grid);
  const AggregatedData data = aggregate_inputs(y, x, config.scheme);

  RhoProfile fits(config.rho_grid.size());
  parallel_for(fits.size(), config.threads, [&](size_t i) {
    fits[i] = fit_for_rho(data, config.rho_grid[i], config, &x.names);
  });

  size_t best = 0;
  for (size_t i = 1; i < fits.size(); ++i) {
    if (fits[i].bic < fits[best].bic) best = i;
  }
  DisaggResult result = finish(y, x, config.scheme, fits[best]);
  for (const auto& fit : fits) append_unique(result.warnings, fit.warnings);
  if (profile) *profile = std::move(fits);
  return result;
}

DisaggResult adaptive_refine(const LowFreqSeries& y, const IndicatorPanel& x,
                             const DisaggResult& stage1, const SptdConfig& config) {
  const IndexList keep = nonzero_indices(stage1.beta);
  if (keep.empty()) {
    DisaggResult out = stage1;
    out.warnings.push_back("adaptive stage skipped: initial estimate is the null model");
    return out;
  }

  const AggregatedData data = aggregate_inputs(y, x, config.scheme);
  const WhitenedProblem full = rotate(data, stage1.rho_hat);

  // Columns with a zero initial estimate carry an infinite penalty and are
  // left out; the rest are scaled by |beta_init|.
  WhitenedProblem scaled;
  scaled.y = full.y;
  scaled.log_det_s = full.log_det_s;
  scaled.X.resize(full.n(), static_cast<Index>(keep.size()));
  std::vector<std::string> names;
  for (size_t c = 0; c < keep.size(); ++c) {
    scaled.X.col(static_cast<Index>(c)) = full.X.col(keep[c]) * std::abs(stage1.beta(keep[c]));
    names.push_back(x.names[static_cast<size_t>(keep[c])]);
  }

  const SolutionPath path = path_for_selection(scaled, config.cutoff_fraction, &names);
  PathSelection sel = select_breakpoint(scaled, path, config.refit, config.cutoff_fraction);

  RhoFit chosen;
  chosen.rho = stage1.rho_hat;
  chosen.beta = Vector::Zero(x.count());
  for (size_t c = 0; c < keep.size(); ++c) {
    chosen.beta(keep[c]) = sel.beta(static_cast<Index>(c)) * std::abs(stage1.beta(keep[c]));
  }
  chosen.lambda = sel.lambda;
  chosen.bic = sel.score.bic;
  chosen.sigma2 = sel.score.sigma2;
  chosen.log_likelihood = sel.score.log_likelihood;
  chosen.k = sel.score.k;

  DisaggResult result = finish(y, x, config.scheme, chosen);
  result.warnings = stage1.warnings;
  append_unique(result.warnings, sel.warnings);
  return result;
}

DisaggResult adaptive_fit(const LowFreqSeries& y, const IndicatorPanel& x,
                          const SptdConfig& config) {
  return adaptive_refine(y, x, sptd_fit(y, x, config), config);
}

}  // namespace sparsetd
