// Command-line front end for sparse and Chow-Lin temporal disaggregation.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include <sparsetd/app.hpp>
#include <sparsetd/errors.hpp>

int main(int argc, char** argv) {
  using namespace sparsetd;

  CLI::App app{"tdisagg: temporal disaggregation with sparse (lasso) and Chow-Lin GLS"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file; command-line flags win");

  RunConfig config;
  std::string method = "sptd-rf";
  std::string scheme = "sum";

  auto* dis = app.add_subcommand("disaggregate", "estimate a high-frequency series");
  dis->add_option("--low-freq", config.low_freq_path, "low-frequency CSV (period,value)")
      ->required();
  dis->add_option("--indicators", config.indicators_path,
                  "high-frequency indicator CSV (period, one column per indicator)")
      ->required();
  dis->add_option("--method", method, "chowlin | sptd | sptd-rf | adaptive")
      ->check(CLI::IsMember({"chowlin", "sptd", "sptd-rf", "adaptive"}))
      ->capture_default_str();
  dis->add_option("--ratio", config.ratio, "high-frequency periods per low-frequency period")
      ->required()
      ->check(CLI::PositiveNumber);
  dis->add_option("--scheme", scheme, "sum | average | first | last")
      ->check(CLI::IsMember({"sum", "average", "first", "last"}))
      ->capture_default_str();
  dis->add_option("--rho-min", config.rho_min, "smallest grid value of rho")->capture_default_str();
  dis->add_option("--rho-max", config.rho_max, "largest grid value of rho")->capture_default_str();
  dis->add_option("--rho-step", config.rho_step, "grid spacing")->capture_default_str();
  dis->add_option("--cutoff", config.cutoff, "BIC cut-off as a fraction of n")
      ->capture_default_str();
  dis->add_flag("--standardize,!--no-standardize", config.standardize,
                "standardize inputs (default: on for sparse methods, off for chowlin)");
  dis->add_flag("--impute-linear", config.impute_linear,
                "fill interior missing values by linear interpolation");
  dis->add_option("--out-series", config.out_series, "output CSV (period,estimate)")->required();
  dis->add_option("--out-report", config.out_report, "output JSON report")->required();
  dis->add_option("--threads", config.threads, "worker threads")->capture_default_str();
  dis->add_option("--seed", config.seed, "random seed (recorded in the report)");

  auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo experiment");
  sim->add_option("--scenario", config.scenario_path, "key = value scenario file")->required();
  sim->add_option("--out", config.out_path, "output report (delimited text)")->required();
  sim->add_option("--threads", config.threads, "worker threads")->capture_default_str();
  sim->add_option("--seed", config.seed, "overrides the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (const auto* cfg = app.get_option("--config"); cfg->count() > 0) {
    config.config_file = cfg->as<std::string>();
  }
  if (dis->parsed()) {
    config.command = Command::Disaggregate;
    config.method = parse_method(method);
    config.scheme = parse_aggregation_kind(scheme);
  } else {
    config.command = Command::Simulate;
  }
  return run(config, std::cerr);
}
