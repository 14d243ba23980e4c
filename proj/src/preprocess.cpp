#include <sparsetd/preprocess.hpp>

#include <cmath>

#include <sparsetd/errors.hpp>

namespace sparsetd {

namespace {

double sample_sd(const Vector& v, double mean) {
  if (v.size() < 2) return 0.0;
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

}  // namespace

StandardizedData standardize_panel(const LowFreqSeries& y, const IndicatorPanel& x,
                                   const AggregationScheme& scheme) {
  validate(y);
  StandardizedData out;
  ScalingRecord& rec = out.record;

  rec.y_mean = y.values.mean();
  rec.y_sd = sample_sd(y.values, rec.y_mean);
  if (!(rec.y_sd > 0.0)) {
    throw InputError("low-frequency series '" + y.label + "' is constant; cannot standardize");
  }
  out.y.label = y.label;
  out.y.values = (y.values.array() - rec.y_mean) / rec.y_sd;

  const Index p = x.count();
  rec.x_mean.resize(p);
  rec.x_sd.resize(p);
  out.x.names = x.names;
  out.x.values.resize(x.periods(), p);
  for (Index j = 0; j < p; ++j) {
    const Vector col = x.values.col(j);
    rec.x_mean(j) = col.mean();
    rec.x_sd(j) = sample_sd(col, rec.x_mean(j));
    if (!(rec.x_sd(j) > 0.0)) {
      const std::string name =
          j < static_cast<Index>(x.names.size()) ? x.names[static_cast<size_t>(j)] : "?";
      throw InputError("indicator '" + name + "' is constant; cannot standardize");
    }
    out.x.values.col(j) = (col.array() - rec.x_mean(j)) / rec.x_sd(j);
  }

  AggregationScheme one = scheme;
  one.n = 1;
  rec.level_divisor = build_aggregation_matrix(one).sum();
  return out;
}

Matrix unstandardize(const Matrix& x_std, const ScalingRecord& record) {
  if (x_std.cols() != record.x_sd.size()) throw InputError("unstandardize: column count mismatch");
  Matrix out = x_std * record.x_sd.asDiagonal();
  out.rowwise() += record.x_mean.transpose();
  return out;
}

Vector rescale_estimate(const Vector& z_std, const ScalingRecord& record) {
  if (!(record.level_divisor > 0.0)) throw InputError("scaling record has no aggregation weight");
  return (z_std.array() * record.y_sd + record.y_mean / record.level_divisor).matrix();
}

}  // namespace sparsetd
