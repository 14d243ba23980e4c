#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <sparsetd/aggregation.hpp>

namespace sparsetd {

enum class Command { Disaggregate, Simulate };
enum class Method { ChowLin, Sptd, SptdRefit, Adaptive };

std::string_view to_string(Method method);
/// Accepts chowlin, sptd, sptd-rf (or sptd_rf) and adaptive.
Method parse_method(std::string_view text);

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitIdentifiability = 3,
  kExitNumerical = 4,
};

struct RunConfig {
  Command command = Command::Disaggregate;
  Method method = Method::SptdRefit;

  std::string low_freq_path;
  std::string indicators_path;
  std::string out_series;
  std::string out_report;

  std::string scenario_path;
  std::string out_path;

  Index ratio = 0;
  AggregationKind scheme = AggregationKind::Sum;
  double rho_min = 0.01;
  double rho_max = 0.99;
  double rho_step = 0.01;
  double cutoff = 0.5;
  /// Unset means the method's default: on for the sparse methods, off for Chow-Lin.
  std::optional<bool> standardize;
  bool impute_linear = false;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
  std::string config_file;
};

/// Executes one command. Errors are reported on `err` as
/// "error[<category>]: <message>" and mapped onto ExitCode.
int run(const RunConfig& config, std::ostream& err);

}  // namespace sparsetd
