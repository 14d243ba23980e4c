#include <sparsetd/chowlin.hpp>

#include <cmath>
#include <sstream>

#include <sparsetd/errors.hpp>
#include <sparsetd/parallel.hpp>

namespace sparsetd {

namespace {

struct GridPoint {
  GlsFit fit;
  double log_likelihood = 0.0;
  double sigma2 = 0.0;
};

}  // namespace

DisaggResult chowlin_fit(const LowFreqSeries& y, const IndicatorPanel& x,
                         const ChowLinConfig& config,
                         std::vector<ChowLinProfilePoint>* profile) {
  validate_rho_grid(config.rho_grid);
  const Index n = y.size();
  if (x.count() >= n) {
    std::ostringstream msg;
    msg << "Chow-Lin not applicable in high dimensions: p = " << x.count() << " >= n = " << n;
    throw IdentifiabilityError(msg.str());
  }
  const AggregatedData data = aggregate_inputs(y, x, config.scheme);

  std::vector<GridPoint> points(config.rho_grid.size());
  parallel_for(points.size(), config.threads, [&](size_t i) {
    const WhitenedProblem problem = rotate(data, config.rho_grid[i]);
    GridPoint& pt = points[i];
    pt.fit = gls_fit(problem);
    // The classical profile estimate divides by n, not n - p.
    pt.sigma2 = std::max(pt.fit.rss / static_cast<double>(n),
                         std::numeric_limits<double>::min());
    pt.log_likelihood = log_likelihood_from_rss(n, problem.log_det_s, pt.fit.rss, pt.sigma2);
  });

  size_t best = 0;
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i].log_likelihood > points[best].log_likelihood) best = i;
  }
  const GridPoint& chosen = points[best];

  AggregationScheme scheme = config.scheme;
  scheme.n = n;
  DisaggResult result;
  result.beta = chosen.fit.beta;
  result.rho_hat = config.rho_grid[best];
  result.sigma2_hat = chosen.sigma2;
  result.log_likelihood = chosen.log_likelihood;
  result.bic = -2.0 * chosen.log_likelihood +
               std::log(static_cast<double>(n)) * static_cast<double>(x.count());
  result.active_set = nonzero_indices(result.beta);
  result.warnings = chosen.fit.warnings;
  Disaggregation series =
      disaggregate(y, x, result.beta, {result.rho_hat, 1.0, scheme.m()}, scheme);
  result.zbar = std::move(series.zbar);
  result.z = std::move(series.z);

  if (profile) {
    profile->clear();
    for (size_t i = 0; i < points.size(); ++i) {
      profile->push_back({config.rho_grid[i], points[i].log_likelihood, points[i].sigma2});
    }
  }
  return result;
}

}  // namespace sparsetd
