#include <sparsetd/aggregation.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include <sparsetd/errors.hpp>

namespace sparsetd {

std::string_view to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::Sum: return "sum";
    case AggregationKind::Average: return "average";
    case AggregationKind::First: return "first";
    case AggregationKind::Last: return "last";
  }
  return "sum";
}

AggregationKind parse_aggregation_kind(std::string_view text) {
  if (text == "sum") return AggregationKind::Sum;
  if (text == "average") return AggregationKind::Average;
  if (text == "first") return AggregationKind::First;
  if (text == "last") return AggregationKind::Last;
  throw InputError("unknown aggregation scheme '" + std::string(text) +
                   "' (expected sum, average, first or last)");
}

void validate(const LowFreqSeries& y) {
  if (y.size() < 2) throw InputError("low-frequency series needs at least 2 observations");
  if (!y.values.allFinite()) throw InputError("low-frequency series has non-finite values");
}

void validate(const IndicatorPanel& x, const AggregationScheme& scheme) {
  if (x.count() == 0) throw InputError("indicator panel has no columns");
  if (!x.values.allFinite()) throw InputError("indicator panel has non-finite values");
  if (static_cast<Index>(x.names.size()) != x.count()) {
    throw InputError("indicator panel: number of names does not match number of columns");
  }
  std::set<std::string> seen;
  for (const auto& name : x.names) {
    if (!seen.insert(name).second) throw InputError("duplicate indicator name '" + name + "'");
  }
  if (scheme.s <= 0) throw InputError("aggregation ratio must be positive");
  if (x.periods() % scheme.s != 0) {
    std::ostringstream msg;
    msg << "indicator panel has " << x.periods() << " periods, not a multiple of ratio "
        << scheme.s;
    throw InputError(msg.str());
  }
  if (x.periods() != scheme.m()) {
    std::ostringstream msg;
    msg << "indicator panel has " << x.periods() << " periods but " << scheme.n
        << " low-frequency observations at ratio " << scheme.s << " imply " << scheme.m();
    throw InputError(msg.str());
  }
}

std::vector<std::string> default_names(Index p) {
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(p));
  for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

IndexList nonzero_indices(const Vector& beta) {
  IndexList out;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) out.push_back(j);
  }
  return out;
}

Matrix build_aggregation_matrix(const AggregationScheme& scheme) {
  if (scheme.s <= 0) throw InputError("aggregation ratio s must be positive");
  if (scheme.n <= 0) throw InputError("low-frequency length n must be positive");
  const Index s = scheme.s;
  Matrix C = Matrix::Zero(scheme.n, scheme.m());
  for (Index i = 0; i < scheme.n; ++i) {
    switch (scheme.kind) {
      case AggregationKind::Sum: C.block(i, i * s, 1, s).setOnes(); break;
      case AggregationKind::Average:
        C.block(i, i * s, 1, s).setConstant(1.0 / static_cast<double>(s));
        break;
      case AggregationKind::First: C(i, i * s) = 1.0; break;
      case AggregationKind::Last: C(i, i * s + s - 1) = 1.0; break;
    }
  }
  return C;
}

Matrix distribution_matrix(const Matrix& V, const Matrix& C, const Matrix& sigma) {
  if (V.rows() != V.cols() || C.cols() != V.rows() || sigma.rows() != C.rows() ||
      sigma.cols() != C.rows()) {
    throw InputError("distribution matrix: inconsistent dimensions of V, C and Sigma");
  }
  const Whitener factor(sigma);
  // D = V C^T Sigma^{-1}  <=>  D^T = Sigma^{-1} C V (V symmetric).
  const Matrix cv = C * V;
  return factor.solve(cv).transpose();
}

Disaggregation disaggregate(const LowFreqSeries& y, const IndicatorPanel& x, const Vector& beta,
                            const Ar1Model& model, const AggregationScheme& scheme) {
  if (y.size() != scheme.n) throw InputError("disaggregate: series length does not match scheme");
  if (x.periods() != scheme.m()) {
    throw InputError("disaggregate: indicator periods do not match n * s");
  }
  if (beta.size() != x.count()) throw InputError("disaggregate: beta length mismatch");
  Ar1Model full = model;
  full.m = scheme.m();
  const CovariancePair cov = ar1_covariance(full);
  const Matrix C = build_aggregation_matrix(scheme);
  const Matrix sigma = aggregate_covariance(cov.V, C);
  const Matrix D = distribution_matrix(cov.V, C, sigma);

  Disaggregation out;
  out.zbar = x.values * beta;
  out.z = out.zbar + D * (y.values - C * out.zbar);
  return out;
}

double temporal_consistency_error(const Matrix& C, const Vector& z, const Vector& y) {
  const double scale = 1.0 + y.cwiseAbs().maxCoeff();
  return (C * z - y).cwiseAbs().maxCoeff() / scale;
}

}  // namespace sparsetd
