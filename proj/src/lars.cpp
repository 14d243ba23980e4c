#include <sparsetd/lars.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <sparsetd/errors.hpp>

namespace sparsetd {

namespace {

constexpr double kCollinearTolerance = 1e-10;

std::string column_label(Index j, const LarsOptions& options) {
  if (options.names && j < static_cast<Index>(options.names->size())) {
    return "'" + (*options.names)[static_cast<size_t>(j)] + "'";
  }
  return std::to_string(j);
}

class LarsSolver {
 public:
  LarsSolver(const Vector& y, const Matrix& X, const LarsOptions& options)
      : y_(y), X_(X), options_(options), n_(X.rows()), p_(X.cols()) {}

  SolutionPath run();

 private:
  void refresh_correlations() { corr_ = X_.transpose() * (y_ - X_ * beta_); }
  IndexList support() const;
  void record(double lambda, PathAction action, Index variable);
  bool depends_on_active(Index j) const;

  const Vector& y_;
  const Matrix& X_;
  const LarsOptions& options_;
  Index n_;
  Index p_;

  Vector beta_;
  Vector corr_;
  IndexList active_;  // entry order
  std::vector<char> in_active_;
  std::vector<char> excluded_;
  SolutionPath path_;
};

IndexList LarsSolver::support() const {
  IndexList out;
  for (Index j : active_) {
    if (beta_(j) != 0.0) out.push_back(j);
  }
  return out;
}

void LarsSolver::record(double lambda, PathAction action, Index variable) {
  PathStep step;
  step.lambda = lambda;
  step.beta = beta_;
  step.active_set = support();
  step.action = action;
  step.variable = variable;
  path_.steps.push_back(std::move(step));
}

bool LarsSolver::depends_on_active(Index j) const {
  const double norm = X_.col(j).norm();
  if (active_.empty()) return false;
  Matrix xa(n_, static_cast<Index>(active_.size()));
  for (size_t k = 0; k < active_.size(); ++k) xa.col(static_cast<Index>(k)) = X_.col(active_[k]);
  const Vector coef = xa.colPivHouseholderQr().solve(X_.col(j));
  const double residual = (X_.col(j) - xa * coef).norm();
  return residual <= kCollinearTolerance * norm;
}

SolutionPath LarsSolver::run() {
  if (y_.size() != n_) throw InputError("lars_path: response length does not match design rows");
  if (n_ == 0 || p_ == 0) throw InputError("lars_path: empty design");
  if (!y_.allFinite() || !X_.allFinite()) throw InputError("lars_path: non-finite input");
  for (Index j = 0; j < p_; ++j) {
    if (X_.col(j).squaredNorm() == 0.0) {
      throw InputError("lars_path: column " + column_label(j, options_) +
                       " has zero variance after rotation and cannot enter the path");
    }
  }

  const Index saturation = std::min(n_, p_);
  const Index budget = options_.max_steps > 0 ? options_.max_steps : 8 * saturation;

  beta_ = Vector::Zero(p_);
  in_active_.assign(static_cast<size_t>(p_), 0);
  excluded_.assign(static_cast<size_t>(p_), 0);
  refresh_correlations();

  Index first = 0;
  double lambda = corr_.cwiseAbs().maxCoeff();
  const double scale = y_.norm() * X_.colwise().norm().maxCoeff();
  const double zero_level = 1e-13 * std::max(scale, std::numeric_limits<double>::min());
  if (lambda <= zero_level) {
    record(lambda, PathAction::End, -1);
    return std::move(path_);
  }
  for (Index j = 0; j < p_; ++j) {
    if (std::abs(corr_(j)) >= lambda * (1.0 - kTieTolerance)) {
      first = j;
      break;
    }
  }
  record(lambda, PathAction::Add, first);
  active_.push_back(first);
  in_active_[static_cast<size_t>(first)] = 1;

  Vector signs;
  for (Index iteration = 1;; ++iteration) {
    if (iteration > budget) {
      std::ostringstream msg;
      msg << "LARS exceeded its step budget of " << budget << " steps";
      throw NumericalError(msg.str());
    }

    const Index k = static_cast<Index>(active_.size());
    Matrix xa(n_, k);
    signs.resize(k);
    for (Index c = 0; c < k; ++c) {
      const Index j = active_[static_cast<size_t>(c)];
      xa.col(c) = X_.col(j);
      signs(c) = corr_(j) >= 0.0 ? 1.0 : -1.0;
    }
    const Matrix gram = xa.transpose() * xa;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("LARS: active-set Gram matrix is not positive definite");
    }
    const Vector w = llt.solve(signs);
    const Vector direction = xa * w;
    const Vector a = X_.transpose() * direction;

    // Step to lambda = 0 unless an entry or a sign change comes first.
    double gamma = lambda;
    PathAction action = PathAction::End;
    Index variable = -1;

    const double floor = kTieTolerance * lambda;
    if (k < saturation) {
      for (;;) {
        double best = gamma;
        Index chosen = -1;
        for (Index j = 0; j < p_; ++j) {
          if (in_active_[static_cast<size_t>(j)] || excluded_[static_cast<size_t>(j)]) continue;
          double g = std::numeric_limits<double>::infinity();
          const double lo = 1.0 - a(j);
          const double hi = 1.0 + a(j);
          if (lo > 0.0) {
            const double r = (lambda - corr_(j)) / lo;
            if (r > floor) g = std::min(g, r);
          }
          if (hi > 0.0) {
            const double r = (lambda + corr_(j)) / hi;
            if (r > floor) g = std::min(g, r);
          }
          if (g < best * (1.0 - kTieTolerance) || (chosen < 0 && g < best)) {
            best = g;
            chosen = j;
          }
        }
        if (chosen < 0) break;
        if (depends_on_active(chosen)) {
          excluded_[static_cast<size_t>(chosen)] = 1;
          continue;
        }
        gamma = best;
        action = PathAction::Add;
        variable = chosen;
        break;
      }
    }

    // Lasso modification: stop where an active coefficient changes sign.
    for (Index c = 0; c < k; ++c) {
      const Index j = active_[static_cast<size_t>(c)];
      if (beta_(j) == 0.0 || w(c) == 0.0) continue;
      const double g = -beta_(j) / w(c);
      if (g > floor && g < gamma) {
        gamma = g;
        action = PathAction::Drop;
        variable = j;
      }
    }

    for (Index c = 0; c < k; ++c) beta_(active_[static_cast<size_t>(c)]) += gamma * w(c);
    double next_lambda = lambda - gamma;
    if (action == PathAction::End || next_lambda <= zero_level) {
      next_lambda = 0.0;
      if (action != PathAction::Drop) action = PathAction::End;
    }

    if (action == PathAction::Drop) {
      beta_(variable) = 0.0;
      active_.erase(std::find(active_.begin(), active_.end(), variable));
      in_active_[static_cast<size_t>(variable)] = 0;
    }
    refresh_correlations();
    lambda = next_lambda;

    if (action == PathAction::End) {
      record(0.0, PathAction::End, -1);
      break;
    }
    record(lambda, action, variable);
    if (action == PathAction::Add) {
      active_.push_back(variable);
      in_active_[static_cast<size_t>(variable)] = 1;
    }
    if (options_.max_active > 0 &&
        static_cast<Index>(path_.steps.back().active_set.size()) >= options_.max_active) {
      path_.truncated = true;
      break;
    }
    if (active_.empty()) {
      // Everything dropped out; restart from the largest correlation.
      Index j = 0;
      corr_.cwiseAbs().maxCoeff(&j);
      active_.push_back(j);
      in_active_[static_cast<size_t>(j)] = 1;
    }
  }
  return std::move(path_);
}

}  // namespace

SolutionPath lars_path(const Vector& y, const Matrix& X, const LarsOptions& options) {
  LarsSolver solver(y, X, options);
  return solver.run();
}

Vector coefficients_at(const SolutionPath& path, double lambda, Warnings* warnings) {
  if (path.steps.empty()) throw InputError("coefficients_at: empty path");
  const double top = path.front().lambda;
  const double bottom = path.back().lambda;
  if (lambda > top || lambda < bottom || !std::isfinite(lambda)) {
    if (warnings) {
      std::ostringstream msg;
      msg << "lambda " << lambda << " outside path range [" << bottom << ", " << top
          << "]; clamped";
      warnings->push_back(msg.str());
    }
    if (!(lambda <= top)) return path.front().beta;
    return path.back().beta;
  }
  for (size_t k = 0; k + 1 < path.steps.size(); ++k) {
    const PathStep& hi = path.steps[k];
    const PathStep& lo = path.steps[k + 1];
    if (lambda == hi.lambda) return hi.beta;
    if (lambda > lo.lambda) {
      const double t = (hi.lambda - lambda) / (hi.lambda - lo.lambda);
      return (1.0 - t) * hi.beta + t * lo.beta;
    }
  }
  return path.back().beta;
}

}  // namespace sparsetd
