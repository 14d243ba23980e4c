#include <sparsetd/covariance.hpp>

#include <cmath>
#include <sstream>

#include <sparsetd/errors.hpp>

namespace sparsetd {

void validate(const Ar1Model& model) {
  if (!std::isfinite(model.rho) || std::abs(model.rho) >= 1.0) {
    std::ostringstream msg;
    msg << "AR(1) model is not stationary: |rho| = " << std::abs(model.rho) << " >= 1";
    throw InputError(msg.str());
  }
  if (std::abs(model.rho) > kMaxAbsRho) {
    std::ostringstream msg;
    msg << "AR(1) rho = " << model.rho << " is too close to the unit root (|rho| > " << kMaxAbsRho
        << ")";
    throw InputError(msg.str());
  }
  if (!(model.sigma2 > 0.0) || !std::isfinite(model.sigma2)) {
    throw InputError("AR(1) innovation variance must be positive and finite");
  }
  if (model.m <= 0) {
    throw InputError("AR(1) covariance needs a positive number of periods");
  }
}

CovariancePair ar1_covariance(const Ar1Model& model) {
  validate(model);
  const Index m = model.m;
  const double scale = 1.0 / (1.0 - model.rho * model.rho);

  // Powers rho^k for k = 0..m-1; exact zeros for rho = 0 beyond the diagonal.
  Vector powers(m);
  powers(0) = 1.0;
  for (Index k = 1; k < m; ++k) powers(k) = powers(k - 1) * model.rho;

  CovariancePair out;
  out.S.resize(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) out.S(i, j) = scale * powers(std::abs(i - j));
  }
  out.V = model.sigma2 * out.S;
  return out;
}

Matrix aggregate_covariance(const Matrix& V, const Matrix& C) {
  if (V.rows() != V.cols()) throw InputError("covariance matrix must be square");
  if (C.cols() != V.rows()) {
    std::ostringstream msg;
    msg << "aggregation matrix has " << C.cols() << " columns but covariance is " << V.rows()
        << "x" << V.cols();
    throw InputError(msg.str());
  }
  const Index n = C.rows();

  std::vector<IndexList> support(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index q = 0; q < C.cols(); ++q) {
      if (C(i, q) != 0.0) support[static_cast<size_t>(i)].push_back(q);
    }
  }

  Matrix sigma(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k <= i; ++k) {
      double acc = 0.0;
      for (Index a : support[static_cast<size_t>(i)]) {
        for (Index b : support[static_cast<size_t>(k)]) acc += C(i, a) * V(a, b) * C(k, b);
      }
      sigma(i, k) = acc;
      sigma(k, i) = acc;
    }
  }
  return sigma;
}

Whitener::Whitener(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw InputError("whitening needs a non-empty square matrix");
  }
  if (!sigma.allFinite()) throw NumericalError("covariance matrix has non-finite entries");
  llt_.compute(sigma);
  const Vector diag = llt_.matrixLLT().diagonal();
  if (llt_.info() != Eigen::Success || !(diag.minCoeff() > 0.0)) {
    Eigen::LDLT<Matrix> ldlt(sigma);
    const Vector pivots = ldlt.vectorD();
    Index where = 0;
    const double smallest = pivots.minCoeff(&where);
    std::ostringstream msg;
    msg << "covariance matrix is not positive definite: smallest pivot " << smallest
        << " at position " << where;
    throw NumericalError(msg.str());
  }
  log_det_ = 2.0 * diag.array().log().sum();
}

Vector Whitener::apply(const Vector& v) const {
  if (v.size() != size()) throw InputError("whitening: vector length mismatch");
  return llt_.matrixL().solve(v);
}

Matrix Whitener::apply(const Matrix& a) const {
  if (a.rows() != size()) throw InputError("whitening: matrix row count mismatch");
  return llt_.matrixL().solve(a);
}

Matrix Whitener::solve(const Matrix& b) const {
  if (b.rows() != size()) throw InputError("solve: row count mismatch");
  return llt_.solve(b);
}

Matrix Whitener::transform() const {
  return llt_.matrixL().solve(Matrix::Identity(size(), size()));
}

Matrix whitening_transform(const Matrix& sigma) { return Whitener(sigma).transform(); }

}  // namespace sparsetd
