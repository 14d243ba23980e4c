#include <sparsetd/simlab.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <sparsetd/chowlin.hpp>
#include <sparsetd/errors.hpp>
#include <sparsetd/parallel.hpp>
#include <sparsetd/rng.hpp>

namespace sparsetd {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Keyed stream identifiers within a replicate.
constexpr std::uint64_t kIndicatorStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kCovarianceStream = 2;

}  // namespace

std::string_view to_string(Design design) {
  switch (design) {
    case Design::IidNormal: return "iid_normal";
    case Design::RandomWalk: return "random_walk";
    case Design::BlockEquicorr: return "block_equicorr";
    case Design::RandomCov: return "random_cov";
  }
  return "iid_normal";
}

std::string_view to_string(BetaPattern pattern) {
  switch (pattern) {
    case BetaPattern::TenFives: return "ten_fives";
    case BetaPattern::AlternatingSigns: return "alternating_signs";
    case BetaPattern::BlockPattern: return "block_pattern";
  }
  return "ten_fives";
}

Design parse_design(std::string_view text) {
  const std::string t = lower(text);
  if (t == "iid_normal") return Design::IidNormal;
  if (t == "random_walk") return Design::RandomWalk;
  if (t == "block_equicorr") return Design::BlockEquicorr;
  if (t == "random_cov") return Design::RandomCov;
  throw InputError("unknown design '" + std::string(text) + "'");
}

BetaPattern parse_beta_pattern(std::string_view text) {
  const std::string t = lower(text);
  if (t == "ten_fives") return BetaPattern::TenFives;
  if (t == "alternating_signs") return BetaPattern::AlternatingSigns;
  if (t == "block_pattern") return BetaPattern::BlockPattern;
  throw InputError("unknown beta pattern '" + std::string(text) + "'");
}

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::ChowLin: return "CL";
    case Arm::Sptd: return "spTD";
    case Arm::SptdRefit: return "spTD_RF";
    case Arm::Adaptive: return "adaptive";
  }
  return "spTD_RF";
}

Arm parse_arm(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "cl" || t == "chowlin") return Arm::ChowLin;
  if (t == "sptd") return Arm::Sptd;
  if (t == "sptd_rf" || t == "sptd-rf") return Arm::SptdRefit;
  if (t == "adaptive") return Arm::Adaptive;
  throw InputError("unknown arm '" + std::string(text) + "'");
}

void validate(const Scenario& sc) {
  if (sc.n < 4) throw InputError("scenario: n must be at least 4");
  if (sc.s < 1) throw InputError("scenario: ratio must be positive");
  if (sc.p < 1) throw InputError("scenario: p must be positive");
  if (sc.replicates < 1) throw InputError("scenario: replicates must be positive");
  if (!(std::abs(sc.rho_true) < 1.0)) throw InputError("scenario: |rho| must be below 1");
  if (!(sc.theta >= 0.0 && sc.theta < 1.0)) throw InputError("scenario: theta must be in [0, 1)");
  if (sc.block_size < 1) throw InputError("scenario: block size must be positive");
  validate_rho_grid(sc.rho_grid);
}

Vector make_beta(BetaPattern pattern, Index p, Index block_size) {
  Vector beta = Vector::Zero(p);
  switch (pattern) {
    case BetaPattern::TenFives:
      if (p < 10) throw InputError("ten_fives pattern needs p >= 10");
      beta.head(10).setConstant(5.0);
      break;
    case BetaPattern::AlternatingSigns:
      if (p < 10) throw InputError("alternating_signs pattern needs p >= 10");
      for (Index j = 0; j < 10; ++j) beta(j) = (j % 2 == 0) ? -2.0 : 2.0;
      break;
    case BetaPattern::BlockPattern: {
      if (block_size < 5 || p < 3 * block_size) {
        throw InputError("block_pattern needs block size >= 5 and p >= 3 blocks");
      }
      for (Index b = 0; b < 3; ++b) beta.segment(b * block_size, 5).setConstant(5.0);
      break;
    }
  }
  return beta;
}

Matrix random_correlation(Index p, std::uint64_t cov_seed, std::uint64_t draw) {
  KeyedStream rng(cov_seed, draw, kCovarianceStream);
  Matrix g(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) g(i, j) = rng.normal();
  }
  Matrix r = g * g.transpose();
  const Vector inv_sd = r.diagonal().cwiseSqrt().cwiseInverse();
  r = inv_sd.asDiagonal() * r * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return r;
}

double irrepresentable_index(const Matrix& correlation, const Vector& beta) {
  const IndexList active = nonzero_indices(beta);
  IndexList inactive;
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) == 0.0) inactive.push_back(j);
  }
  if (active.empty() || inactive.empty()) return 0.0;
  const auto ka = static_cast<Index>(active.size());
  const auto ki = static_cast<Index>(inactive.size());
  Matrix saa(ka, ka);
  Matrix sia(ki, ka);
  Vector sign(ka);
  for (Index a = 0; a < ka; ++a) {
    sign(a) = beta(active[static_cast<size_t>(a)]) > 0.0 ? 1.0 : -1.0;
    for (Index b = 0; b < ka; ++b) {
      saa(a, b) = correlation(active[static_cast<size_t>(a)], active[static_cast<size_t>(b)]);
    }
    for (Index i = 0; i < ki; ++i) {
      sia(i, a) = correlation(inactive[static_cast<size_t>(i)], active[static_cast<size_t>(a)]);
    }
  }
  return (sia * saa.ldlt().solve(sign)).cwiseAbs().maxCoeff();
}

CorrelationDraw design_correlation(const Scenario& sc) {
  const Vector beta = make_beta(sc.beta, sc.p, sc.block_size);
  CorrelationDraw best;
  for (std::uint64_t draw = 0; draw < kMaxCovarianceDraws; ++draw) {
    Matrix r = random_correlation(sc.p, sc.cov_seed, draw);
    const double index = irrepresentable_index(r, beta);
    if (draw == 0 || index > best.irrepresentable) {
      best.correlation = std::move(r);
      best.draw = draw;
      best.irrepresentable = index;
    }
    if (index >= 1.0) break;
  }
  return best;
}

Instance generate_instance(const Scenario& sc, Index replicate_index) {
  validate(sc);
  const Index m = sc.n * sc.s;
  const Index p = sc.p;
  const auto rep = static_cast<std::uint64_t>(replicate_index);

  Instance inst;
  inst.beta_true = make_beta(sc.beta, p, sc.block_size);

  KeyedStream xs(sc.seed, rep, kIndicatorStream);
  Matrix x(m, p);
  switch (sc.design) {
    case Design::IidNormal:
      for (Index j = 0; j < p; ++j) {
        for (Index t = 0; t < m; ++t) x(t, j) = xs.normal();
      }
      break;
    case Design::RandomWalk:
      for (Index j = 0; j < p; ++j) {
        double level = 0.0;
        for (Index t = 0; t < m; ++t) {
          level += xs.normal();
          x(t, j) = level;
        }
      }
      break;
    case Design::BlockEquicorr: {
      const double shared = std::sqrt(sc.theta);
      const double own = std::sqrt(1.0 - sc.theta);
      for (Index t = 0; t < m; ++t) {
        for (Index start = 0; start < p; start += sc.block_size) {
          const double factor = xs.normal();
          const Index end = std::min(p, start + sc.block_size);
          for (Index j = start; j < end; ++j) x(t, j) = shared * factor + own * xs.normal();
        }
      }
      break;
    }
    case Design::RandomCov: {
      const Matrix chol = design_correlation(sc).correlation.llt().matrixL();
      Vector g(p);
      for (Index t = 0; t < m; ++t) {
        for (Index j = 0; j < p; ++j) g(j) = xs.normal();
        x.row(t) = (chol * g).transpose();
      }
      break;
    }
  }

  KeyedStream us(sc.seed, rep, kNoiseStream);
  Vector u(m);
  u(0) = us.normal() / std::sqrt(1.0 - sc.rho_true * sc.rho_true);
  for (Index t = 1; t < m; ++t) u(t) = sc.rho_true * u(t - 1) + us.normal();

  inst.z_true = x * inst.beta_true + u;
  const Matrix C = build_aggregation_matrix({AggregationKind::Sum, sc.s, sc.n});
  inst.y.values = C * inst.z_true;
  inst.y.label = "y";
  inst.x.values = std::move(x);
  inst.x.names = default_names(p);
  return inst;
}

MetricsRecord evaluate_fit(const DisaggResult& result, const Vector& z_true,
                           const Vector& beta_true) {
  if (result.z.size() != z_true.size() || result.beta.size() != beta_true.size()) {
    throw InputError("evaluate_fit: dimension mismatch");
  }
  MetricsRecord out;
  out.rmse_z = std::sqrt((result.z - z_true).squaredNorm() / static_cast<double>(z_true.size()));
  const Vector diff = result.beta - beta_true;
  out.rmse_beta = std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
  out.linf_beta = diff.cwiseAbs().maxCoeff();
  for (Index j = 0; j < beta_true.size(); ++j) {
    const bool est = result.beta(j) != 0.0;
    const bool truth = beta_true(j) != 0.0;
    if (est && !truth) ++out.fp;
    if (!est && truth) ++out.fn;
  }
  out.rho_hat = result.rho_hat;
  out.exact_support = out.fp == 0 && out.fn == 0;
  return out;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"rmse_z", "rmse_beta", "linf_beta", "fp",
                                                 "fn",     "rho_hat",   "exact_support"};
  return names;
}

namespace {

std::vector<double> as_values(const MetricsRecord& r) {
  return {r.rmse_z,
          r.rmse_beta,
          r.linf_beta,
          static_cast<double>(r.fp),
          static_cast<double>(r.fn),
          r.rho_hat,
          r.exact_support ? 1.0 : 0.0};
}

constexpr double kConsistencyTolerance = 1e-8;

void check_consistency(const DisaggResult& result, const Instance& inst, Arm arm,
                       Index replicate) {
  const Matrix C = build_aggregation_matrix(
      {AggregationKind::Sum, result.z.size() / inst.y.size(), inst.y.size()});
  const double err = temporal_consistency_error(C, result.z, inst.y.values);
  if (!(err <= kConsistencyTolerance)) {
    std::ostringstream msg;
    msg << "temporal consistency violated for arm " << to_string(arm) << " replicate "
        << replicate << ": relative error " << err;
    throw NumericalError(msg.str());
  }
}

}  // namespace

const ArmSummary& ExperimentReport::arm(Arm which) const {
  for (const auto& s : summary) {
    if (s.arm == which) return s;
  }
  throw InputError("arm " + std::string(to_string(which)) + " was not run");
}

std::vector<MetricsRecord> ExperimentReport::metrics(Arm which) const {
  std::vector<MetricsRecord> out;
  for (const auto& row : rows) {
    if (row.arm == which) out.push_back(row.metrics);
  }
  return out;
}

ExperimentReport run_experiment(const Scenario& scenario, const std::vector<Arm>& arms,
                                unsigned threads) {
  validate(scenario);
  if (arms.empty()) throw InputError("run_experiment: no arms requested");

  ExperimentReport report;
  report.scenario = scenario;
  report.arms = arms;
  if (scenario.design == Design::RandomCov) {
    report.correlation = design_correlation(scenario);
  }

  const bool cl_possible = scenario.p < scenario.n;
  auto wants = [&](Arm a) { return std::find(arms.begin(), arms.end(), a) != arms.end(); };

  SptdConfig base;
  base.rho_grid = scenario.rho_grid;
  base.cutoff_fraction = scenario.cutoff_fraction;
  base.scheme = {AggregationKind::Sum, scenario.s, scenario.n};

  const auto reps = static_cast<size_t>(scenario.replicates);
  std::vector<std::vector<ExperimentRow>> per_rep(reps);
  parallel_for(reps, threads, [&](size_t r) {
    const auto rep = static_cast<Index>(r);
    const Instance inst = generate_instance(scenario, rep);
    std::optional<DisaggResult> refit;
    if (wants(Arm::SptdRefit) || wants(Arm::Adaptive)) {
      SptdConfig cfg = base;
      cfg.refit = true;
      refit = sptd_fit(inst.y, inst.x, cfg);
    }
    for (Arm arm : arms) {
      DisaggResult result;
      switch (arm) {
        case Arm::ChowLin: {
          if (!cl_possible) continue;
          ChowLinConfig cfg;
          cfg.rho_grid = scenario.rho_grid;
          cfg.scheme = base.scheme;
          result = chowlin_fit(inst.y, inst.x, cfg);
          break;
        }
        case Arm::Sptd: {
          SptdConfig cfg = base;
          cfg.refit = false;
          result = sptd_fit(inst.y, inst.x, cfg);
          break;
        }
        case Arm::SptdRefit: result = *refit; break;
        case Arm::Adaptive: result = adaptive_refine(inst.y, inst.x, *refit, base); break;
      }
      check_consistency(result, inst, arm, rep);
      per_rep[r].push_back({arm, rep, evaluate_fit(result, inst.z_true, inst.beta_true),
                            result.beta});
    }
  });

  for (auto& rows : per_rep) {
    for (auto& row : rows) report.rows.push_back(std::move(row));
  }

  const size_t nm = metric_names().size();
  for (Arm arm : arms) {
    ArmSummary s;
    s.arm = arm;
    if (arm == Arm::ChowLin && !cl_possible) {
      s.skipped = true;
      s.note = "skipped: p >= n, Chow-Lin not applicable in high dimensions";
      report.summary.push_back(std::move(s));
      continue;
    }
    s.mean.assign(nm, 0.0);
    s.sd.assign(nm, 0.0);
    std::vector<std::vector<double>> values;
    for (const auto& row : report.rows) {
      if (row.arm == arm) values.push_back(as_values(row.metrics));
    }
    s.count = static_cast<Index>(values.size());
    for (size_t k = 0; k < nm; ++k) {
      double sum = 0.0;
      for (const auto& v : values) sum += v[k];
      const double mean = sum / static_cast<double>(values.size());
      double ss = 0.0;
      for (const auto& v : values) ss += (v[k] - mean) * (v[k] - mean);
      s.mean[k] = mean;
      s.sd[k] = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    }
    report.summary.push_back(std::move(s));
  }
  return report;
}

void write_report(std::ostream& out, const ExperimentReport& report) {
  const Scenario& sc = report.scenario;
  out << "# sparsetd simulation report\n";
  out << "# n=" << sc.n << " ratio=" << sc.s << " p=" << sc.p
      << " rho=" << format_number(sc.rho_true) << " design=" << to_string(sc.design);
  if (sc.design == Design::BlockEquicorr) {
    out << " theta=" << format_number(sc.theta) << " block_size=" << sc.block_size;
  }
  if (sc.design == Design::RandomCov) out << " cov_seed=" << sc.cov_seed;
  out << " beta=" << to_string(sc.beta) << " replicates=" << sc.replicates
      << " seed=" << sc.seed << "\n";
  out << "# rho_grid=" << format_number(sc.rho_grid.front()) << ".."
      << format_number(sc.rho_grid.back()) << " (" << sc.rho_grid.size() << " points)"
      << " cutoff=" << format_number(sc.cutoff_fraction) << "\n";
  if (report.correlation) {
    out << "# cov_draw=" << report.correlation->draw
        << " irrepresentable_index=" << format_number(report.correlation->irrepresentable) << "\n";
  }

  out << "arm,replicate";
  for (const auto& name : metric_names()) out << ',' << name;
  out << '\n';
  for (const auto& row : report.rows) {
    const MetricsRecord& r = row.metrics;
    out << to_string(row.arm) << ',' << row.replicate << ',' << format_number(r.rmse_z) << ','
        << format_number(r.rmse_beta) << ',' << format_number(r.linf_beta) << ',' << r.fp << ','
        << r.fn << ',' << format_number(r.rho_hat) << ',' << (r.exact_support ? 1 : 0) << '\n';
  }

  out << "# summary\n";
  out << "arm,metric,mean,sd\n";
  for (const auto& s : report.summary) {
    if (s.skipped) {
      out << to_string(s.arm) << ",skipped,,\n";
      out << "# " << to_string(s.arm) << ": " << s.note << '\n';
      continue;
    }
    for (size_t k = 0; k < metric_names().size(); ++k) {
      out << to_string(s.arm) << ',' << metric_names()[k] << ',' << format_number(s.mean[k])
          << ',' << format_number(s.sd[k]) << '\n';
    }
  }
}

std::pair<Scenario, std::vector<Arm>> read_scenario(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InputError("scenario line " + std::to_string(lineno) + ": expected key = value");
    }
    kv[lower(trim(body.substr(0, eq)))] = trim(body.substr(eq + 1));
  }

  Scenario sc;
  std::vector<Arm> arms = {Arm::ChowLin, Arm::Sptd, Arm::SptdRefit};
  double rho_min = 0.01, rho_max = 0.99, rho_step = 0.01;

  auto as_int = [](const std::string& key, const std::string& v) -> long long {
    try {
      size_t used = 0;
      const long long out = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw InputError("scenario key '" + key + "': expected an integer, got '" + v + "'");
    }
  };
  auto as_real = [](const std::string& key, const std::string& v) {
    try {
      size_t used = 0;
      const double out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      throw InputError("scenario key '" + key + "': expected a number, got '" + v + "'");
    }
  };

  for (const auto& [key, value] : kv) {
    if (key == "n") sc.n = as_int(key, value);
    else if (key == "ratio" || key == "s") sc.s = as_int(key, value);
    else if (key == "p") sc.p = as_int(key, value);
    else if (key == "rho" || key == "rho_true") sc.rho_true = as_real(key, value);
    else if (key == "design") sc.design = parse_design(value);
    else if (key == "theta") sc.theta = as_real(key, value);
    else if (key == "block_size") sc.block_size = as_int(key, value);
    else if (key == "cov_seed") sc.cov_seed = static_cast<std::uint64_t>(as_int(key, value));
    else if (key == "beta") sc.beta = parse_beta_pattern(value);
    else if (key == "replicates") sc.replicates = as_int(key, value);
    else if (key == "seed") sc.seed = static_cast<std::uint64_t>(as_int(key, value));
    else if (key == "rho_min") rho_min = as_real(key, value);
    else if (key == "rho_max") rho_max = as_real(key, value);
    else if (key == "rho_step") rho_step = as_real(key, value);
    else if (key == "cutoff") sc.cutoff_fraction = as_real(key, value);
    else if (key == "arms") {
      arms.clear();
      std::stringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        if (!trim(item).empty()) arms.push_back(parse_arm(item));
      }
    } else {
      throw InputError("unknown scenario key '" + key + "'");
    }
  }
  sc.rho_grid = make_rho_grid(rho_min, rho_max, rho_step);
  validate(sc);
  return {sc, arms};
}

}  // namespace sparsetd
