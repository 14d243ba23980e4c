#pragma once

#include <sparsetd/types.hpp>

namespace sparsetd {

/// AR(1) error process u_j = rho * u_{j-1} + e_j, e_j ~ N(0, sigma2), over
/// m high-frequency periods.
struct Ar1Model {
  double rho = 0.0;
  double sigma2 = 1.0;
  Index m = 0;
};

/// Largest |rho| accepted; the grid search never gets closer to the unit root.
inline constexpr double kMaxAbsRho = 0.999;

void validate(const Ar1Model& model);

/// Full covariance V and its scaled form S with V = sigma2 * S.
struct CovariancePair {
  Matrix V;
  Matrix S;
};

/// Toeplitz covariance V[i][j] = sigma2 * rho^|i-j| / (1 - rho^2).
CovariancePair ar1_covariance(const Ar1Model& model);

/// Sigma = C V C^T. Zero entries of C are skipped, so block-sparse
/// aggregation matrices cost O(n^2 s^2) instead of O(n m^2).
Matrix aggregate_covariance(const Matrix& V, const Matrix& C);

/// Cholesky factor of an SPD matrix with the operations GLS needs.
/// Whitening uses W = L^{-1}, so W^T W = Sigma^{-1}.
class Whitener {
 public:
  /// Throws NumericalError naming the smallest pivot if Sigma is not SPD.
  explicit Whitener(const Matrix& sigma);

  Index size() const { return llt_.rows(); }
  /// Applies W = L^{-1} to a vector or to every column of a matrix.
  Vector apply(const Vector& v) const;
  Matrix apply(const Matrix& a) const;
  /// Sigma^{-1} b via two triangular solves.
  Matrix solve(const Matrix& b) const;
  /// log|Sigma| as twice the sum of log pivots.
  double log_det() const { return log_det_; }
  /// Explicit W (lower triangular).
  Matrix transform() const;

 private:
  Eigen::LLT<Matrix> llt_;
  double log_det_ = 0.0;
};

/// Returns W with W^T W = Sigma^{-1}.
Matrix whitening_transform(const Matrix& sigma);

}  // namespace sparsetd
