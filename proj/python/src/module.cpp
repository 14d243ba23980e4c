#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include <sparsetd/chowlin.hpp>
#include <sparsetd/covariance.hpp>
#include <sparsetd/errors.hpp>
#include <sparsetd/lars.hpp>
#include <sparsetd/simlab.hpp>
#include <sparsetd/sptd.hpp>

namespace py = pybind11;
using namespace sparsetd;

namespace {

AggregationScheme make_scheme(Index s, const std::string& kind) {
  return {parse_aggregation_kind(kind), s, 0};
}

IndicatorPanel make_panel(const Matrix& x, std::optional<std::vector<std::string>> names) {
  return {x, names ? *names : default_names(x.cols())};
}

std::vector<double> grid_or_default(std::optional<std::vector<double>> grid) {
  return grid ? *grid : default_rho_grid();
}

}  // namespace

PYBIND11_MODULE(_sparsetd, m) {
  m.doc() = "Sparse temporal disaggregation (compiled core)";

  auto base = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<IdentifiabilityError>(m, "IdentifiabilityError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  (void)base;

  m.def(
      "ar1_covariance",
      [](double rho, Index m_, double sigma2) {
        auto cov = ar1_covariance({rho, sigma2, m_});
        return py::make_tuple(cov.V, cov.S);
      },
      py::arg("rho"), py::arg("m"), py::arg("sigma2") = 1.0,
      "AR(1) covariance V and its scaled form S = V / sigma2.");

  m.def(
      "aggregation_matrix",
      [](Index n, Index s, const std::string& scheme) {
        return build_aggregation_matrix({parse_aggregation_kind(scheme), s, n});
      },
      py::arg("n"), py::arg("s"), py::arg("scheme") = "sum");

  m.def("whitening_transform", &whitening_transform, py::arg("sigma"),
        "Lower-triangular W with W^T W = inverse(sigma).");

  py::enum_<PathAction>(m, "PathAction")
      .value("ADD", PathAction::Add)
      .value("DROP", PathAction::Drop)
      .value("END", PathAction::End);

  py::class_<PathStep>(m, "PathStep")
      .def_readonly("lambda_", &PathStep::lambda)
      .def_readonly("beta", &PathStep::beta)
      .def_readonly("active_set", &PathStep::active_set)
      .def_readonly("action", &PathStep::action)
      .def_readonly("variable", &PathStep::variable);

  py::class_<SolutionPath>(m, "SolutionPath")
      .def_readonly("steps", &SolutionPath::steps)
      .def_readonly("truncated", &SolutionPath::truncated)
      .def("__len__", &SolutionPath::size)
      .def(
          "coefficients_at",
          [](const SolutionPath& path, double lambda) { return coefficients_at(path, lambda); },
          py::arg("lambda_"));

  m.def(
      "lars_path",
      [](const Vector& y, const Matrix& x, Index max_steps, Index max_active) {
        return lars_path(y, x, {max_steps, max_active, nullptr});
      },
      py::arg("y"), py::arg("X"), py::arg("max_steps") = 0, py::arg("max_active") = 0,
      "Lasso path by least-angle regression; lambda is the residual correlation scale.");

  py::class_<DisaggResult>(m, "DisaggResult")
      .def_readonly("beta", &DisaggResult::beta)
      .def_readonly("rho_hat", &DisaggResult::rho_hat)
      .def_readonly("sigma2_hat", &DisaggResult::sigma2_hat)
      .def_readonly("lambda_hat", &DisaggResult::lambda_hat)
      .def_readonly("lambda_penalty", &DisaggResult::lambda_penalty)
      .def_readonly("bic", &DisaggResult::bic)
      .def_readonly("log_likelihood", &DisaggResult::log_likelihood)
      .def_readonly("zbar", &DisaggResult::zbar)
      .def_readonly("z", &DisaggResult::z)
      .def_readonly("active_set", &DisaggResult::active_set)
      .def_readonly("warnings", &DisaggResult::warnings);

  m.def(
      "sptd_fit",
      [](const Vector& y, const Matrix& x, Index s, const std::string& scheme,
         std::optional<std::vector<double>> rho_grid, bool refit, double cutoff, bool adaptive,
         unsigned threads, std::optional<std::vector<std::string>> names) {
        SptdConfig config;
        config.rho_grid = grid_or_default(std::move(rho_grid));
        config.refit = refit;
        config.cutoff_fraction = cutoff;
        config.adaptive = adaptive;
        config.scheme = make_scheme(s, scheme);
        config.threads = threads;
        const LowFreqSeries ys{y, "y"};
        const IndicatorPanel panel = make_panel(x, std::move(names));
        py::gil_scoped_release release;
        return adaptive ? adaptive_fit(ys, panel, config) : sptd_fit(ys, panel, config);
      },
      py::arg("y"), py::arg("X"), py::arg("s") = 4, py::arg("scheme") = "sum",
      py::arg("rho_grid") = py::none(), py::arg("refit") = true, py::arg("cutoff") = 0.5,
      py::arg("adaptive") = false, py::arg("threads") = 1, py::arg("names") = py::none());

  m.def(
      "chowlin_fit",
      [](const Vector& y, const Matrix& x, Index s, const std::string& scheme,
         std::optional<std::vector<double>> rho_grid, unsigned threads) {
        ChowLinConfig config;
        config.rho_grid = grid_or_default(std::move(rho_grid));
        config.scheme = make_scheme(s, scheme);
        config.threads = threads;
        const LowFreqSeries ys{y, "y"};
        const IndicatorPanel panel = make_panel(x, std::nullopt);
        py::gil_scoped_release release;
        return chowlin_fit(ys, panel, config);
      },
      py::arg("y"), py::arg("X"), py::arg("s") = 4, py::arg("scheme") = "sum",
      py::arg("rho_grid") = py::none(), py::arg("threads") = 1);

  m.def(
      "disaggregate",
      [](const Vector& y, const Matrix& x, const Vector& beta, double rho, Index s,
         const std::string& scheme) {
        AggregationScheme sch = make_scheme(s, scheme);
        sch.n = y.size();
        auto out = disaggregate({y, "y"}, make_panel(x, std::nullopt), beta,
                                {rho, 1.0, sch.m()}, sch);
        return py::make_tuple(out.zbar, out.z);
      },
      py::arg("y"), py::arg("X"), py::arg("beta"), py::arg("rho"), py::arg("s") = 4,
      py::arg("scheme") = "sum", "Returns (zbar, z) with z aggregating back to y.");

  m.def(
      "simulate",
      [](const std::string& scenario, std::optional<std::uint64_t> seed, unsigned threads) {
        std::istringstream in(scenario);
        auto [sc, arms] = read_scenario(in);
        if (seed) sc.seed = *seed;
        std::ostringstream out;
        {
          py::gil_scoped_release release;
          write_report(out, run_experiment(sc, arms, threads));
        }
        return out.str();
      },
      py::arg("scenario"), py::arg("seed") = py::none(), py::arg("threads") = 1,
      "Runs a key = value scenario and returns the report text.");
}
