#include <sparsetd/gls.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include <sparsetd/errors.hpp>

namespace sparsetd {

WhitenedProblem whiten(const Whitener& factor, const Vector& y, const Matrix& aggregated_x) {
  WhitenedProblem out;
  out.y = factor.apply(y);
  out.X = factor.apply(aggregated_x);
  out.log_det_s = factor.log_det();
  return out;
}

namespace {

constexpr const char* kNotIdentifiable = "GLS not identifiable: p >= n or collinear columns";

Matrix select_columns(const Matrix& x, const IndexList& cols) {
  Matrix out(x.rows(), static_cast<Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = x.col(cols[k]);
  return out;
}

}  // namespace

GlsFit gls_fit(const WhitenedProblem& problem, const std::optional<IndexList>& support) {
  const Index n = problem.n();
  const Index p = problem.p();
  if (problem.X.rows() != n) throw InputError("gls_fit: design and response row counts differ");

  const bool strict = !support.has_value();
  IndexList cols;
  if (support) {
    cols = *support;
    for (Index j : cols) {
      if (j < 0 || j >= p) throw InputError("gls_fit: support index out of range");
    }
  } else {
    cols.resize(static_cast<size_t>(p));
    for (Index j = 0; j < p; ++j) cols[static_cast<size_t>(j)] = j;
  }

  GlsFit fit;
  fit.beta = Vector::Zero(p);
  if (cols.empty()) {
    fit.rss = problem.y.squaredNorm();
    return fit;
  }
  if (static_cast<Index>(cols.size()) >= n) {
    std::ostringstream msg;
    msg << kNotIdentifiable << " (" << cols.size() << " columns, " << n << " observations)";
    throw IdentifiabilityError(msg.str());
  }

  Matrix xs = select_columns(problem.X, cols);
  Eigen::HouseholderQR<Matrix> qr(xs);
  const Index k = static_cast<Index>(cols.size());
  Vector pivots = qr.matrixQR().diagonal().head(k).cwiseAbs();
  const double largest = pivots.maxCoeff();

  IndexList kept;
  for (Index c = 0; c < k; ++c) {
    if (pivots(c) > kCollinearityTolerance * largest) {
      kept.push_back(cols[static_cast<size_t>(c)]);
    } else if (strict) {
      std::ostringstream msg;
      msg << kNotIdentifiable << " (column " << cols[static_cast<size_t>(c)]
          << " is linearly dependent on earlier columns)";
      throw IdentifiabilityError(msg.str());
    } else {
      std::ostringstream msg;
      msg << "refit dropped column " << cols[static_cast<size_t>(c)]
          << ": linearly dependent on earlier-entering columns";
      fit.warnings.push_back(msg.str());
    }
  }
  if (largest == 0.0) kept.clear();

  if (kept.size() != cols.size()) {
    if (kept.empty()) {
      fit.rss = problem.y.squaredNorm();
      return fit;
    }
    xs = select_columns(problem.X, kept);
    qr.compute(xs);
    pivots = qr.matrixQR().diagonal().head(static_cast<Index>(kept.size())).cwiseAbs();
  }

  if (pivots.maxCoeff() > 1e8 * pivots.minCoeff()) {
    fit.warnings.push_back("GLS design is ill-conditioned; coefficient variance will be large");
  }

  const Vector coef = qr.solve(problem.y);
  for (size_t c = 0; c < kept.size(); ++c) fit.beta(kept[c]) = coef(static_cast<Index>(c));
  fit.support = std::move(kept);
  fit.rss = residual_sum_of_squares(problem, fit.beta);
  return fit;
}

double residual_sum_of_squares(const WhitenedProblem& problem, const Vector& beta) {
  if (beta.size() != problem.p()) throw InputError("beta length does not match design");
  return (problem.y - problem.X * beta).squaredNorm();
}

double sigma2_hat(const WhitenedProblem& problem, const Vector& beta, Index k) {
  const Index n = problem.n();
  if (k < 0 || k >= n) {
    std::ostringstream msg;
    msg << "variance estimate needs 0 <= k < n (k = " << k << ", n = " << n << ")";
    throw InputError(msg.str());
  }
  return residual_sum_of_squares(problem, beta) / static_cast<double>(n - k);
}

double log_likelihood_from_rss(Index n, double log_det_s, double rss, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InputError("log-likelihood needs a positive finite variance");
  }
  if (!std::isfinite(rss) || !std::isfinite(log_det_s)) {
    throw NumericalError("log-likelihood inputs are not finite");
  }
  const double nn = static_cast<double>(n);
  return -0.5 * nn * std::log(2.0 * std::numbers::pi) - 0.5 * nn * std::log(sigma2) -
         0.5 * log_det_s - rss / (2.0 * sigma2);
}

double log_likelihood(const WhitenedProblem& problem, const Vector& beta, double sigma2) {
  return log_likelihood_from_rss(problem.n(), problem.log_det_s,
                                 residual_sum_of_squares(problem, beta), sigma2);
}

}  // namespace sparsetd
