#include <sparsetd/app.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include <sparsetd/chowlin.hpp>
#include <sparsetd/errors.hpp>
#include <sparsetd/preprocess.hpp>
#include <sparsetd/series_io.hpp>
#include <sparsetd/simlab.hpp>
#include <sparsetd/sptd.hpp>

namespace sparsetd {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ChowLin: return "chowlin";
    case Method::Sptd: return "sptd";
    case Method::SptdRefit: return "sptd-rf";
    case Method::Adaptive: return "adaptive";
  }
  return "sptd-rf";
}

Method parse_method(std::string_view text) {
  if (text == "chowlin") return Method::ChowLin;
  if (text == "sptd") return Method::Sptd;
  if (text == "sptd-rf" || text == "sptd_rf") return Method::SptdRefit;
  if (text == "adaptive") return Method::Adaptive;
  throw InputError("unknown method '" + std::string(text) +
                   "' (expected chowlin, sptd, sptd-rf or adaptive)");
}

namespace {

using json = nlohmann::ordered_json;

/// Relative tolerance for the aggregate check on the emitted series.
constexpr double kOutputConsistency = 1e-6;

std::ofstream open_output(const std::string& path) {
  if (path.empty()) throw InputError("output path is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

json effective_config(const RunConfig& c, bool standardize) {
  json j;
  j["method"] = to_string(c.method);
  j["low_freq"] = c.low_freq_path;
  j["indicators"] = c.indicators_path;
  j["ratio"] = c.ratio;
  j["scheme"] = to_string(c.scheme);
  j["rho_min"] = c.rho_min;
  j["rho_max"] = c.rho_max;
  j["rho_step"] = c.rho_step;
  j["cutoff"] = c.cutoff;
  j["standardize"] = standardize;
  j["impute_linear"] = c.impute_linear;
  j["threads"] = c.threads;
  if (c.seed) j["seed"] = *c.seed;
  if (!c.config_file.empty()) j["config_file"] = c.config_file;
  j["out_series"] = c.out_series;
  j["out_report"] = c.out_report;
  return j;
}

void run_disaggregate(const RunConfig& c) {
  if (c.low_freq_path.empty() || c.indicators_path.empty()) {
    throw InputError("disaggregate needs --low-freq and --indicators");
  }
  if (c.ratio <= 0) throw InputError("disaggregate needs a positive --ratio");

  const SeriesTable low = read_series_table(c.low_freq_path, c.impute_linear);
  const SeriesTable high = read_series_table(c.indicators_path, c.impute_linear);
  const LowFreqSeries y = to_low_freq(low);
  const IndicatorPanel x = to_indicators(high);
  const AggregationScheme scheme{c.scheme, c.ratio, y.size()};
  validate(y);
  validate(x, scheme);

  const bool standardize = c.standardize.value_or(c.method != Method::ChowLin);
  const std::vector<double> grid = make_rho_grid(c.rho_min, c.rho_max, c.rho_step);

  LowFreqSeries y_fit = y;
  IndicatorPanel x_fit = x;
  ScalingRecord record;
  if (standardize) {
    StandardizedData std_data = standardize_panel(y, x, scheme);
    y_fit = std::move(std_data.y);
    x_fit = std::move(std_data.x);
    record = std::move(std_data.record);
  }

  DisaggResult result;
  if (c.method == Method::ChowLin) {
    ChowLinConfig cfg;
    cfg.rho_grid = grid;
    cfg.scheme = scheme;
    cfg.threads = c.threads;
    result = chowlin_fit(y_fit, x_fit, cfg);
  } else {
    SptdConfig cfg;
    cfg.rho_grid = grid;
    cfg.scheme = scheme;
    cfg.cutoff_fraction = c.cutoff;
    cfg.refit = c.method != Method::Sptd;
    cfg.adaptive = c.method == Method::Adaptive;
    cfg.threads = c.threads;
    result = cfg.adaptive ? adaptive_fit(y_fit, x_fit, cfg) : sptd_fit(y_fit, x_fit, cfg);
  }

  const Vector z = standardize ? rescale_estimate(result.z, record) : result.z;
  const Matrix C = build_aggregation_matrix(scheme);
  const double mismatch = temporal_consistency_error(C, z, y.values);
  Warnings warnings = result.warnings;
  if (!(mismatch <= kOutputConsistency)) {
    warnings.push_back("emitted series does not aggregate back to the input (relative error " +
                       std::to_string(mismatch) + ")");
  }

  {
    std::ofstream out = open_output(c.out_series);
    write_series(out, high.periods, z);
  }

  json report;
  report["method"] = to_string(c.method);
  report["rho_hat"] = result.rho_hat;
  report["sigma2_hat"] = result.sigma2_hat;
  report["lambda_hat"] = result.lambda_hat;
  report["lambda_penalty"] = result.lambda_penalty;
  report["bic"] = result.bic;
  report["log_likelihood"] = result.log_likelihood;
  report["n"] = y.size();
  report["m"] = x.periods();
  report["p"] = x.count();
  report["coefficient_scale"] = standardize ? "standardized" : "original";

  IndexList order = result.active_set;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(result.beta(a)) > std::abs(result.beta(b));
  });
  json selected = json::array();
  for (Index j : order) {
    selected.push_back({{"indicator", x.names[static_cast<size_t>(j)]},
                        {"coefficient", result.beta(j)}});
  }
  report["selected"] = std::move(selected);
  report["aggregation_error"] = mismatch;

  json notes = json::array();
  if (standardize && record.level_divisor != 3.0) {
    notes.push_back("output level restored as mean(y) / " + std::to_string(record.level_divisor) +
                    ": the mean/3 monthly-from-quarterly rule generalised to this scheme");
  }
  report["notes"] = std::move(notes);
  report["warnings"] = warnings;
  report["config"] = effective_config(c, standardize);

  std::ofstream out = open_output(c.out_report);
  out << report.dump(2) << '\n';
}

void run_simulate(const RunConfig& c) {
  if (c.scenario_path.empty()) throw InputError("simulate needs --scenario");
  std::ifstream in(c.scenario_path);
  if (!in) throw InputError("cannot open scenario '" + c.scenario_path + "'");
  auto [scenario, arms] = read_scenario(in);
  if (c.seed) scenario.seed = *c.seed;
  const ExperimentReport report = run_experiment(scenario, arms, c.threads);
  std::ofstream out = open_output(c.out_path);
  write_report(out, report);
}

}  // namespace

int run(const RunConfig& config, std::ostream& err) {
  try {
    if (config.threads == 0) throw InputError("--threads must be at least 1");
    if (config.command == Command::Disaggregate) {
      run_disaggregate(config);
    } else {
      run_simulate(config);
    }
    return kExitOk;
  } catch (const InputError& e) {
    err << "error[input]: " << e.what() << '\n';
    return kExitInput;
  } catch (const IdentifiabilityError& e) {
    err << "error[identifiability]: " << e.what() << '\n';
    return kExitIdentifiability;
  } catch (const NumericalError& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace sparsetd
