#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <sparsetd/aggregation.hpp>
#include <sparsetd/sptd.hpp>

namespace sparsetd {

enum class Design { IidNormal, RandomWalk, BlockEquicorr, RandomCov };

enum class BetaPattern {
  TenFives,          // ten 5's, then zeros
  AlternatingSigns,  // -2, 2, ... ten times, then zeros
  BlockPattern,      // five 5's then zeros in each of the first 3 blocks
};

std::string_view to_string(Design design);
std::string_view to_string(BetaPattern pattern);
Design parse_design(std::string_view text);
BetaPattern parse_beta_pattern(std::string_view text);

/// Seed of the fixed correlation matrix used by the random-covariance design.
inline constexpr std::uint64_t kDefaultCovarianceSeed = 20220131;

struct Scenario {
  Index n = 100;
  Index s = 4;
  Index p = 30;
  double rho_true = 0.5;
  Design design = Design::IidNormal;
  double theta = 0.0;
  Index block_size = 10;
  std::uint64_t cov_seed = kDefaultCovarianceSeed;
  BetaPattern beta = BetaPattern::TenFives;
  Index replicates = 200;
  std::uint64_t seed = 1;
  std::vector<double> rho_grid = default_rho_grid();
  double cutoff_fraction = 0.5;
};

void validate(const Scenario& scenario);

Vector make_beta(BetaPattern pattern, Index p, Index block_size = 10);

/// A p x p Gaussian factor G drawn from (cov_seed, draw), R = G G^T rescaled
/// to unit diagonal.
Matrix random_correlation(Index p, std::uint64_t cov_seed, std::uint64_t draw = 0);

/// max_j |Sigma_{S^c S} Sigma_{SS}^{-1} sign(beta_S)|_j; values >= 1 break the
/// irrepresentable condition.
double irrepresentable_index(const Matrix& correlation, const Vector& beta);

/// Draws tried when looking for a correlation matrix that breaks the
/// irrepresentable condition.
inline constexpr std::uint64_t kMaxCovarianceDraws = 64;

struct CorrelationDraw {
  Matrix correlation;
  std::uint64_t draw = 0;
  double irrepresentable = 0.0;
};

/// Correlation matrix of the random-covariance design: the first draw from
/// cov_seed whose irrepresentable index for the scenario's beta is >= 1, or
/// the draw with the largest index if none of kMaxCovarianceDraws qualifies.
CorrelationDraw design_correlation(const Scenario& scenario);

struct Instance {
  LowFreqSeries y;
  IndicatorPanel x;
  Vector z_true;
  Vector beta_true;
};

/// Draws replicate `replicate_index` of the scenario; streams are keyed by
/// (seed, replicate_index).
Instance generate_instance(const Scenario& scenario, Index replicate_index);

struct MetricsRecord {
  double rmse_z = 0.0;
  double rmse_beta = 0.0;
  double linf_beta = 0.0;
  Index fp = 0;
  Index fn = 0;
  double rho_hat = 0.0;
  bool exact_support = false;
};

MetricsRecord evaluate_fit(const DisaggResult& result, const Vector& z_true,
                           const Vector& beta_true);

enum class Arm { ChowLin, Sptd, SptdRefit, Adaptive };

std::string_view to_string(Arm arm);
Arm parse_arm(std::string_view text);

struct ArmSummary {
  Arm arm = Arm::SptdRefit;
  bool skipped = false;
  std::string note;
  Index count = 0;
  // mean / sample sd per metric, in MetricsRecord field order
  std::vector<double> mean;
  std::vector<double> sd;
};

struct ExperimentRow {
  Arm arm = Arm::SptdRefit;
  Index replicate = 0;
  MetricsRecord metrics;
  Vector beta;
};

struct ExperimentReport {
  Scenario scenario;
  std::vector<Arm> arms;
  std::vector<ExperimentRow> rows;  // replicate-major, arms in request order
  std::vector<ArmSummary> summary;
  /// Random-covariance design only.
  std::optional<CorrelationDraw> correlation;

  const ArmSummary& arm(Arm which) const;
  std::vector<MetricsRecord> metrics(Arm which) const;
};

/// Metric names in MetricsRecord order.
const std::vector<std::string>& metric_names();

/// Runs every replicate for every arm on `threads` workers. The Chow-Lin arm
/// is skipped when p >= n. Temporal consistency is checked for each fit.
ExperimentReport run_experiment(const Scenario& scenario, const std::vector<Arm>& arms,
                                unsigned threads = 1);

/// Delimited report: header comments, one row per replicate and arm, then a
/// summary block. Byte-identical for identical inputs.
void write_report(std::ostream& out, const ExperimentReport& report);

/// Reads a key = value scenario file ('#' starts a comment). Returns the
/// scenario and the requested arms.
std::pair<Scenario, std::vector<Arm>> read_scenario(std::istream& in);

}  // namespace sparsetd
