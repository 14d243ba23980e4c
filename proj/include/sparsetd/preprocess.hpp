#pragma once

#include <sparsetd/aggregation.hpp>

namespace sparsetd {

/// Means and sample standard deviations removed by standardize_panel, plus
/// the aggregation weight used to put the output level back.
struct ScalingRecord {
  double y_mean = 0.0;
  double y_sd = 1.0;
  Vector x_mean;
  Vector x_sd;
  /// Row sum of the aggregation matrix: s for sums, 1 for averages and
  /// point-in-time schemes.
  double level_divisor = 1.0;
};

struct StandardizedData {
  LowFreqSeries y;
  IndicatorPanel x;
  ScalingRecord record;
};

/// Centres and scales y and every indicator column to zero mean and unit
/// sample variance. Constant columns are rejected by name.
StandardizedData standardize_panel(const LowFreqSeries& y, const IndicatorPanel& x,
                                   const AggregationScheme& scheme);

/// Inverse of the indicator transform.
Matrix unstandardize(const Matrix& x_std, const ScalingRecord& record);

/// z = z_std * sd(y) + mean(y) / level_divisor. With a sum scheme the
/// divisor is s, so the result aggregates back to y.
Vector rescale_estimate(const Vector& z_std, const ScalingRecord& record);

}  // namespace sparsetd
