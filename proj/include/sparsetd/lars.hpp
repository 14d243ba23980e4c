#pragma once

#include <optional>
#include <string>
#include <vector>

#include <sparsetd/types.hpp>

namespace sparsetd {

enum class PathAction { Add, Drop, End };

/// One breakpoint of the lasso path.
///
/// lambda is the common absolute correlation |x_j^T (y - X beta)| of the
/// active variables, so beta solves min 0.5 ||y - X b||^2 + lambda ||b||_1.
/// active_set lists the nonzero coefficients of beta in entry order. action
/// is the event that happens at this breakpoint: a variable joins (its
/// coefficient is still zero here), a coefficient hits zero and leaves, or
/// the path ends.
struct PathStep {
  double lambda = 0.0;
  Vector beta;
  IndexList active_set;
  PathAction action = PathAction::End;
  Index variable = -1;
};

struct SolutionPath {
  std::vector<PathStep> steps;
  /// True when the path stopped at max_active before reaching lambda = 0.
  bool truncated = false;

  const PathStep& front() const { return steps.front(); }
  const PathStep& back() const { return steps.back(); }
  size_t size() const { return steps.size(); }
};

struct LarsOptions {
  /// Step budget; 0 means the default 8 * min(n, p).
  Index max_steps = 0;
  /// Stop once this many coefficients are nonzero; 0 disables.
  Index max_active = 0;
  /// Column names used in error messages.
  const std::vector<std::string>* names = nullptr;
};

/// Relative tolerance for correlation ties on entry; ties go to the lowest index.
inline constexpr double kTieTolerance = 1e-12;

/// Least-angle regression with the lasso modification. Columns are used as
/// given; zero-norm columns are rejected. A candidate that is linearly
/// dependent on the active set never enters.
SolutionPath lars_path(const Vector& y, const Matrix& X, const LarsOptions& options = {});

/// Linear interpolation of the path at lambda. Values outside the path's
/// range are clamped and a warning is appended when `warnings` is given.
Vector coefficients_at(const SolutionPath& path, double lambda, Warnings* warnings = nullptr);

}  // namespace sparsetd
