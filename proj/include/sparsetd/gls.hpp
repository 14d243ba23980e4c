#pragma once

#include <optional>

#include <sparsetd/covariance.hpp>
#include <sparsetd/types.hpp>

namespace sparsetd {

/// Regression after rotation by W = L^{-1}: y_tilde = W y, X_tilde = W C X.
/// log_det_s is log|S| for the Sigma = sigma2 * S used in the rotation.
struct WhitenedProblem {
  Vector y;
  Matrix X;
  double log_det_s = 0.0;

  Index n() const { return y.size(); }
  Index p() const { return X.cols(); }
};

WhitenedProblem whiten(const Whitener& factor, const Vector& y, const Matrix& aggregated_x);

struct GlsFit {
  Vector beta;
  double rss = 0.0;
  /// Columns actually used, in the order supplied.
  IndexList support;
  Warnings warnings;
};

/// A column is treated as dependent when its QR pivot falls below this
/// fraction of the largest pivot.
inline constexpr double kCollinearityTolerance = 1e-10;

/// Least squares on the whitened problem via Householder QR.
///
/// Without a support the full design is used and rank deficiency (p >= n or
/// collinear columns) throws IdentifiabilityError. With a support, columns
/// are taken in the given order and dependent later columns are dropped with
/// a warning; a support of size >= n still throws.
GlsFit gls_fit(const WhitenedProblem& problem, const std::optional<IndexList>& support = {});

double residual_sum_of_squares(const WhitenedProblem& problem, const Vector& beta);

/// RSS / (n - k).
double sigma2_hat(const WhitenedProblem& problem, const Vector& beta, Index k);

/// Gaussian log-likelihood of the aggregated regression with Sigma = sigma2 S.
double log_likelihood(const WhitenedProblem& problem, const Vector& beta, double sigma2);

/// Same as log_likelihood with the residual sum of squares supplied.
double log_likelihood_from_rss(Index n, double log_det_s, double rss, double sigma2);

}  // namespace sparsetd
