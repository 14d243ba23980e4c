#include "doctest.h"
#include "oracles.hpp"

#include <sparsetd/aggregation.hpp>
#include <sparsetd/errors.hpp>

using namespace sparsetd;

namespace {

IndicatorPanel panel(const Matrix& values) {
  return {values, default_names(values.cols())};
}

}  // namespace

TEST_CASE("build_aggregation_matrix small schemes") {
  Matrix sum(2, 4);
  sum << 1, 1, 0, 0, 0, 0, 1, 1;
  CHECK(build_aggregation_matrix({AggregationKind::Sum, 2, 2}) == sum);

  Matrix avg(1, 4);
  avg << 0.25, 0.25, 0.25, 0.25;
  CHECK(build_aggregation_matrix({AggregationKind::Average, 4, 1}) == avg);

  const Matrix last = build_aggregation_matrix({AggregationKind::Last, 3, 2});
  Matrix expected_last = Matrix::Zero(2, 6);
  expected_last(0, 2) = 1.0;
  expected_last(1, 5) = 1.0;
  CHECK(last == expected_last);

  const Matrix first = build_aggregation_matrix({AggregationKind::First, 3, 2});
  CHECK(first(0, 0) == 1.0);
  CHECK(first(1, 3) == 1.0);
  CHECK(first.sum() == 2.0);
}

TEST_CASE("build_aggregation_matrix rejects empty schemes") {
  CHECK_THROWS_AS(build_aggregation_matrix({AggregationKind::Sum, 0, 3}), InputError);
  CHECK_THROWS_AS(build_aggregation_matrix({AggregationKind::Sum, 3, 0}), InputError);
}

TEST_CASE("sum aggregation has one 1 per column and s per row") {
  for (Index n = 1; n <= 6; ++n) {
    for (Index s = 1; s <= 5; ++s) {
      const Matrix c = build_aggregation_matrix({AggregationKind::Sum, s, n});
      CHECK(c == oracle::kron_sum(n, s));
      CHECK((c.colwise().sum().array() == 1.0).all());
      CHECK((c.rowwise().sum().array() == static_cast<double>(s)).all());
    }
  }
}

TEST_CASE("distribution_matrix with white noise spreads residuals evenly") {
  const Index n = 3, s = 4;
  const AggregationScheme scheme{AggregationKind::Sum, s, n};
  const Matrix c = build_aggregation_matrix(scheme);
  const auto cov = ar1_covariance({0.0, 1.0, n * s});
  const Matrix d = distribution_matrix(cov.V, c, aggregate_covariance(cov.V, c));
  for (Index j = 0; j < n * s; ++j) {
    for (Index i = 0; i < n; ++i) {
      CHECK(d(j, i) == doctest::Approx(j / s == i ? 0.25 : 0.0));
    }
  }
}

TEST_CASE("distribution_matrix satisfies C D = I and matches the dense formula") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rho(-0.95, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 7, s = 1 + trial % 4;
    const auto kind = static_cast<AggregationKind>(trial % 4);
    const Matrix c = build_aggregation_matrix({kind, s, n});
    const Matrix v = oracle::ar1_toeplitz(rho(rng), 1.3, n * s);
    const Matrix sigma = oracle::triple_product(c, v);
    const Matrix d = distribution_matrix(v, c, sigma);
    CHECK((c * d - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
  }

  const Matrix c = oracle::kron_sum(2, 2);
  const Matrix v = oracle::ar1_toeplitz(0.5, 1.0, 4);
  const Matrix sigma = oracle::triple_product(c, v);
  const Matrix dense = v.transpose() * c.transpose() * sigma.inverse();
  CHECK((distribution_matrix(v, c, sigma) - dense).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("disaggregate with an exact regression leaves the preliminary series") {
  std::mt19937_64 rng(2);
  const AggregationScheme scheme{AggregationKind::Sum, 4, 6};
  const Matrix x = oracle::random_matrix(24, 2, rng);
  const Vector beta = Vector::Constant(2, 1.5);
  const LowFreqSeries y{build_aggregation_matrix(scheme) * x * beta, "y"};
  const auto out = disaggregate(y, panel(x), beta, {0.6, 1.0, 24}, scheme);
  CHECK((out.z - x * beta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((out.zbar - x * beta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("disaggregate with zero coefficients distributes y") {
  std::mt19937_64 rng(4);
  const AggregationScheme scheme{AggregationKind::Sum, 3, 5};
  const Matrix c = build_aggregation_matrix(scheme);
  const Matrix x = oracle::random_matrix(15, 2, rng);
  const LowFreqSeries y{oracle::random_vector(5, rng), "y"};
  const auto out = disaggregate(y, panel(x), Vector::Zero(2), {0.4, 1.0, 15}, scheme);
  const auto cov = ar1_covariance({0.4, 1.0, 15});
  const Matrix d = distribution_matrix(cov.V, c, aggregate_covariance(cov.V, c));
  CHECK(out.zbar.isZero());
  CHECK((out.z - d * y.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((c * out.z - y.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("disaggregate is temporally consistent on random instances") {
  std::mt19937_64 rng(9);
  const AggregationScheme scheme{AggregationKind::Sum, 4, 10};
  const Matrix c = build_aggregation_matrix(scheme);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix x = oracle::random_matrix(40, 3, rng);
    const LowFreqSeries y{100.0 * oracle::random_vector(10, rng), "y"};
    const Vector beta = oracle::random_vector(3, rng);
    const auto out = disaggregate(y, panel(x), beta, {0.1 * (trial % 9), 1.0, 40}, scheme);
    CHECK((c * out.z - y.values).cwiseAbs().maxCoeff() / y.values.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("disaggregate is additive in y when beta = 0") {
  std::mt19937_64 rng(10);
  const AggregationScheme scheme{AggregationKind::Average, 3, 8};
  const Matrix x = oracle::random_matrix(24, 2, rng);
  const LowFreqSeries y1{oracle::random_vector(8, rng), "a"};
  const LowFreqSeries y2{oracle::random_vector(8, rng), "b"};
  const LowFreqSeries sum{y1.values + y2.values, "a+b"};
  const Ar1Model model{0.7, 1.0, 24};
  const Vector zero = Vector::Zero(2);
  const Vector lhs = disaggregate(sum, panel(x), zero, model, scheme).z;
  const Vector rhs = disaggregate(y1, panel(x), zero, model, scheme).z +
                     disaggregate(y2, panel(x), zero, model, scheme).z;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("indicator periods beyond the last low-frequency observation are rejected") {
  std::mt19937_64 rng(1);
  const AggregationScheme scheme{AggregationKind::Sum, 4, 5};
  const IndicatorPanel x = panel(oracle::random_matrix(24, 2, rng));
  CHECK_THROWS_AS(validate(x, scheme), InputError);
  const LowFreqSeries y{oracle::random_vector(5, rng), "y"};
  CHECK_THROWS_AS(disaggregate(y, x, Vector::Zero(2), {0.5, 1.0, 24}, scheme), InputError);
}

TEST_CASE("panel validation catches duplicate names and bad values") {
  const AggregationScheme scheme{AggregationKind::Sum, 2, 2};
  IndicatorPanel x{Matrix::Ones(4, 2), {"a", "a"}};
  CHECK_THROWS_AS(validate(x, scheme), InputError);
  x.names = {"a", "b"};
  CHECK_NOTHROW(validate(x, scheme));
  x.values(1, 1) = std::nan("");
  CHECK_THROWS_AS(validate(x, scheme), InputError);
  CHECK_THROWS_AS(validate(LowFreqSeries{Vector::Ones(1), "y"}), InputError);
}
