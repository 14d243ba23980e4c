#pragma once

#include <string>
#include <string_view>

#include <sparsetd/covariance.hpp>
#include <sparsetd/types.hpp>

namespace sparsetd {

enum class AggregationKind { Sum, Average, First, Last };

std::string_view to_string(AggregationKind kind);
/// Parses "sum", "average", "first" or "last"; throws InputError otherwise.
AggregationKind parse_aggregation_kind(std::string_view text);

/// How s high-frequency periods map onto one low-frequency observation.
/// The implied high-frequency length is m = n * s.
struct AggregationScheme {
  AggregationKind kind = AggregationKind::Sum;
  Index s = 4;
  Index n = 0;

  Index m() const { return n * s; }
};

struct LowFreqSeries {
  Vector values;
  std::string label;

  Index size() const { return values.size(); }
};

struct IndicatorPanel {
  Matrix values;  // m x p, one column per indicator
  std::vector<std::string> names;

  Index periods() const { return values.rows(); }
  Index count() const { return values.cols(); }
};

void validate(const LowFreqSeries& y);
void validate(const IndicatorPanel& x, const AggregationScheme& scheme);

/// Default indicator names x1..xp.
std::vector<std::string> default_names(Index p);

struct DisaggResult {
  Vector beta;
  double rho_hat = 0.0;
  double sigma2_hat = 0.0;
  /// Maximum absolute residual correlation at the selected breakpoint.
  double lambda_hat = 0.0;
  /// The same penalty on the ||y - Xb||^2 + lambda ||b||_1 scale (2x the above).
  double lambda_penalty = 0.0;
  double bic = 0.0;
  double log_likelihood = 0.0;
  Vector zbar;
  Vector z;
  IndexList active_set;
  Warnings warnings;
};

/// Indices of the nonzero entries of beta, ascending.
IndexList nonzero_indices(const Vector& beta);

/// sum: I_n (x) 1_s; average: I_n (x) 1_s / s; first/last select one sub-period.
Matrix build_aggregation_matrix(const AggregationScheme& scheme);

/// D = V C^T Sigma^{-1}, computed by solving against Sigma. C D = I_n.
Matrix distribution_matrix(const Matrix& V, const Matrix& C, const Matrix& sigma);

struct Disaggregation {
  Vector zbar;
  Vector z;
};

/// zbar = X beta; z = zbar + D (y - C zbar) with D built from V(model).
Disaggregation disaggregate(const LowFreqSeries& y, const IndicatorPanel& x, const Vector& beta,
                            const Ar1Model& model, const AggregationScheme& scheme);

/// max |C z - y| / (1 + max |y|).
double temporal_consistency_error(const Matrix& C, const Vector& z, const Vector& y);

}  // namespace sparsetd
