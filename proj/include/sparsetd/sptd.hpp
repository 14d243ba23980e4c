#pragma once

#include <vector>

#include <sparsetd/aggregation.hpp>
#include <sparsetd/gls.hpp>
#include <sparsetd/lars.hpp>

namespace sparsetd {

/// Evenly spaced grid lo, lo + step, ..., hi (inclusive, to rounding).
std::vector<double> make_rho_grid(double lo, double hi, double step);
/// 0.01, 0.02, ..., 0.99.
std::vector<double> default_rho_grid();
/// -0.99, -0.98, ..., 0.99.
std::vector<double> full_rho_grid();
/// Nonempty, strictly increasing, every |rho| < 1.
void validate_rho_grid(const std::vector<double>& grid);

struct SptdConfig {
  std::vector<double> rho_grid = default_rho_grid();
  /// Re-estimate the nonzero coefficients of each breakpoint by least squares.
  bool refit = true;
  /// Only breakpoints with K < floor(cutoff_fraction * n) are scored.
  double cutoff_fraction = 0.5;
  bool adaptive = false;
  AggregationScheme scheme;
  /// Workers for the per-rho fits.
  unsigned threads = 1;
};

/// Aggregated data shared by every rho of a grid search.
struct AggregatedData {
  Vector y;
  Matrix C;
  Matrix CX;
  Index m = 0;
};

AggregatedData aggregate_inputs(const LowFreqSeries& y, const IndicatorPanel& x,
                                const AggregationScheme& scheme);

/// Rotates by Sigma^{-1/2} with Sigma = C V(rho, sigma2 = 1) C^T.
WhitenedProblem rotate(const AggregatedData& data, double rho);

struct BicScore {
  double bic = 0.0;
  Index k = 0;
  double sigma2 = 0.0;
  double log_likelihood = 0.0;
};

/// BIC = -2 L(beta, sigma2_hat) + log(n) k with sigma2_hat = RSS / (n - k).
BicScore bic_score(const WhitenedProblem& problem, const Vector& beta);

/// Best breakpoint of one lasso path under BIC.
struct PathSelection {
  Vector beta;
  double lambda = 0.0;
  BicScore score;
  /// Index into the path, or -1 when nothing was scorable.
  Index step = -1;
  Warnings warnings;
};

/// Scores every breakpoint with K below the cut-off (refitting first when
/// asked) and keeps the lowest BIC; ties go to the smaller K, then the
/// earlier breakpoint.
PathSelection select_breakpoint(const WhitenedProblem& problem, const SolutionPath& path,
                                bool refit, double cutoff_fraction);

/// Lasso path with the step budget and early stop used by the selection.
SolutionPath path_for_selection(const WhitenedProblem& problem, double cutoff_fraction,
                                const std::vector<std::string>* names = nullptr);

struct RhoFit {
  double rho = 0.0;
  Vector beta;
  double lambda = 0.0;
  double bic = 0.0;
  double sigma2 = 0.0;
  double log_likelihood = 0.0;
  Index k = 0;
  Warnings warnings;
};

using RhoProfile = std::vector<RhoFit>;

RhoFit fit_for_rho(const LowFreqSeries& y, const IndicatorPanel& x, double rho,
                   const SptdConfig& config);
RhoFit fit_for_rho(const AggregatedData& data, double rho, const SptdConfig& config,
                   const std::vector<std::string>* names = nullptr);

/// Grid search over rho; rho_hat minimises BIC (first grid point on ties).
DisaggResult sptd_fit(const LowFreqSeries& y, const IndicatorPanel& x, const SptdConfig& config,
                      RhoProfile* profile = nullptr);

/// Second adaptive-lasso stage on top of a finished sptd_fit.
DisaggResult adaptive_refine(const LowFreqSeries& y, const IndicatorPanel& x,
                             const DisaggResult& stage1, const SptdConfig& config);

/// sptd_fit followed by adaptive_refine.
DisaggResult adaptive_fit(const LowFreqSeries& y, const IndicatorPanel& x,
                          const SptdConfig& config);

}  // namespace sparsetd
