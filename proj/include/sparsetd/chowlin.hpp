#pragma once

#include <vector>

#include <sparsetd/aggregation.hpp>
#include <sparsetd/sptd.hpp>

namespace sparsetd {

struct ChowLinConfig {
  std::vector<double> rho_grid = default_rho_grid();
  AggregationScheme scheme;
  unsigned threads = 1;
};

struct ChowLinProfilePoint {
  double rho = 0.0;
  double log_likelihood = 0.0;
  double sigma2 = 0.0;
};

/// Classical Chow-Lin: full GLS at each grid rho, profile sigma2 = RSS / n,
/// rho_hat maximises the log-likelihood. Throws IdentifiabilityError when
/// p >= n.
DisaggResult chowlin_fit(const LowFreqSeries& y, const IndicatorPanel& x,
                         const ChowLinConfig& config,
                         std::vector<ChowLinProfilePoint>* profile = nullptr);

}  // namespace sparsetd
