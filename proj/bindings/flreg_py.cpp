// Python bindings for the core operations: grids, PCA semimetrics, the two
// kernel estimators, CV selection, the simulation harness and the forecast
// pipeline statistics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flreg/diagnostics.hpp"
#include "flreg/estimator.hpp"
#include "flreg/forecast.hpp"
#include "flreg/simulate.hpp"

namespace py = pybind11;
using namespace flreg;

namespace {

FunctionalSample make_sample(const std::shared_ptr<Grid>& grid,
                             const std::vector<std::vector<double>>& rows,
                             const std::vector<double>& responses) {
  const GridPtr shared = grid;
  std::vector<Curve> curves;
  curves.reserve(rows.size());
  for (const auto& row : rows) curves.emplace_back(shared, row);
  return FunctionalSample(std::move(curves), responses);
}

EstimatorConfig make_config(Method method, const std::string& kernel,
                            std::size_t r_d, std::size_t r_beta, double h) {
  EstimatorConfig cfg;
  cfg.method = method;
  cfg.kernel.kind = kernel_from_name(kernel);
  cfg.d_spec.kind = SemimetricKind::Pca;
  cfg.d_spec.r = r_d;
  cfg.beta_spec.r = r_beta;
  cfg.h = h;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Functional kernel regression core";

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init<std::vector<double>, std::vector<double>>(),
           py::arg("points"), py::arg("weights"))
      .def_property_readonly("points", &Grid::points)
      .def_property_readonly("weights", &Grid::weights)
      .def("__len__", [](const Grid& g) { return g.size(); });

  m.def(
      "uniform_grid",
      [](std::size_t p) {
        return std::const_pointer_cast<Grid>(make_uniform_grid(p));
      },
      py::arg("p"),
      "Equally spaced interior grid on (0, 1) with cell-width weights");

  py::class_<Curve>(m, "Curve")
      .def(py::init([](std::shared_ptr<Grid> grid,
                       std::vector<double> values) {
             return Curve(GridPtr(std::move(grid)), std::move(values));
           }),
           py::arg("grid"), py::arg("values"))
      .def_property_readonly("values", &Curve::values)
      .def_property_readonly("grid", [](const Curve& c) {
        return std::const_pointer_cast<Grid>(c.grid());
      });

  py::class_<FunctionalSample>(m, "FunctionalSample")
      .def(py::init(&make_sample), py::arg("grid"), py::arg("rows"),
           py::arg("responses"))
      .def_property_readonly("responses", &FunctionalSample::responses)
      .def("__len__", &FunctionalSample::size);

  m.def("l2_distance", &l2_distance, py::arg("a"), py::arg("b"));

  py::class_<PcaBasis>(m, "PcaBasis")
      .def_property_readonly("eigenvalues",
                             [](const PcaBasis& b) { return b.eigenvalues; })
      .def_property_readonly("r", &PcaBasis::r);

  m.def("fit_pca_basis", &fit_pca_basis, py::arg("sample"), py::arg("r_max"),
        "Quadrature PCA of the uncentered covariance operator");
  m.def(
      "pca_distance",
      [](const Curve& a, const Curve& b, const PcaBasis& basis,
         std::size_t r) {
        SemimetricSpec spec;
        spec.kind = SemimetricKind::Pca;
        spec.r = r;
        return semimetric_eval(a, b, spec, basis);
      },
      py::arg("a"), py::arg("b"), py::arg("basis"), py::arg("r"));

  m.def(
      "kernel",
      [](const std::string& name, double u) {
        KernelSpec spec;
        spec.kind = kernel_from_name(name);
        return kernel_eval(spec, u);
      },
      py::arg("name"), py::arg("u"));

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("value", &Prediction::value)
      .def_readonly("defined", &Prediction::defined)
      .def_readonly("active_count", &Prediction::active_count);

  m.def(
      "flc_estimate",
      [](const Curve& x, const FunctionalSample& sample,
         const PcaBasis& basis, const std::string& kernel, std::size_t r_d,
         double h) {
        return flc_estimate(
            x, sample, make_config(Method::Flc, kernel, r_d, 0, h), basis);
      },
      py::arg("x"), py::arg("sample"), py::arg("basis"), py::arg("kernel"),
      py::arg("r_d"), py::arg("h"));

  m.def(
      "fll_estimate",
      [](const Curve& x, const FunctionalSample& sample,
         const PcaBasis& basis, const std::string& kernel, std::size_t r_d,
         std::size_t r_beta, double h) {
        return fll_estimate(
            x, sample, make_config(Method::Fll, kernel, r_d, r_beta, h),
            basis);
      },
      py::arg("x"), py::arg("sample"), py::arg("basis"), py::arg("kernel"),
      py::arg("r_d"), py::arg("r_beta"), py::arg("h"));

  m.def(
      "loo_cv_select",
      [](const FunctionalSample& sample, const std::string& method,
         const std::string& kernel, const std::vector<double>& h_quantiles,
         const std::vector<std::size_t>& r_candidates) {
        CvGridSpec grid;
        if (!h_quantiles.empty()) grid.quantiles = h_quantiles;
        KernelSpec kspec;
        kspec.kind = kernel_from_name(kernel);
        auto cv = loo_cv_select(sample, method_from_name(method), kspec, {},
                                grid, r_candidates);
        py::dict out;
        out["h"] = cv.best.h;
        out["r_d"] = cv.best.d_spec.r;
        out["r_beta"] = cv.best.beta_spec.r;
        out["score"] = cv.best_score;
        return out;
      },
      py::arg("sample"), py::arg("method"), py::arg("kernel") = "quadratic",
      py::arg("h_quantiles") = std::vector<double>{},
      py::arg("r_candidates") = std::vector<std::size_t>{1, 2, 3, 4, 5, 6});

  m.def(
      "sample_wiener",
      [](std::size_t p, std::size_t truncation, std::uint64_t seed) {
        WienerConfig cfg;
        cfg.truncation = truncation;
        cfg.grid = make_uniform_grid(p);
        CounterRng rng(seed);
        auto draw = sample_wiener(cfg, rng);
        return py::make_tuple(draw.curve, draw.scores);
      },
      py::arg("p") = 100, py::arg("truncation") = 100, py::arg("seed") = 1);

  m.def(
      "gen_dgp",
      [](std::size_t n, double alpha, std::uint64_t seed, std::size_t p,
         std::size_t truncation, double u_variance) {
        DgpConfig cfg;
        cfg.n = n;
        cfg.ar_alpha = alpha;
        cfg.u_variance = u_variance;
        cfg.wiener.truncation = truncation;
        cfg.wiener.grid = make_uniform_grid(p);
        cfg.seed = seed;
        CounterRng rng(seed);
        auto draw = gen_dgp(cfg, rng);
        return py::make_tuple(draw.sample, draw.true_m);
      },
      py::arg("n"), py::arg("alpha") = 0.0, py::arg("seed") = 1,
      py::arg("p") = 100, py::arg("truncation") = 100,
      py::arg("u_variance") = 0.01);

  m.def(
      "monte_carlo",
      [](std::size_t n, std::size_t n_r, double alpha, std::uint64_t seed,
         std::size_t p, std::size_t threads,
         const std::vector<double>& h_quantiles,
         const std::vector<std::size_t>& r_candidates) {
        DgpConfig dgp;
        dgp.n = n;
        dgp.ar_alpha = alpha;
        dgp.wiener.grid = make_uniform_grid(p);
        dgp.seed = seed;
        McMethodSpec flc, fll;
        flc.method = Method::Flc;
        fll.method = Method::Fll;
        if (!h_quantiles.empty()) {
          flc.h_grid.quantiles = fll.h_grid.quantiles = h_quantiles;
        }
        if (!r_candidates.empty()) {
          flc.r_candidates = fll.r_candidates = r_candidates;
        }
        auto result = run_monte_carlo(dgp, n_r, {flc, fll}, threads);
        py::dict out;
        for (const auto& series : result.series) {
          py::list reps;
          for (const auto& r : series.replicates) {
            py::dict rep;
            rep["mspe"] = r.mspe;
            rep["h"] = r.h;
            rep["r_d"] = r.r_d;
            rep["r_beta"] = r.r_beta;
            rep["failed"] = r.failed;
            reps.append(rep);
          }
          out[method_name(series.method).c_str()] = reps;
        }
        return out;
      },
      py::arg("n"), py::arg("n_r"), py::arg("alpha") = 0.0,
      py::arg("seed") = 1, py::arg("p") = 100, py::arg("threads") = 1,
      py::arg("h_quantiles") = std::vector<double>{},
      py::arg("r_candidates") = std::vector<std::size_t>{});

  m.def(
      "csfe",
      [](const std::vector<double>& loss_flc,
         const std::vector<double>& loss_fll) {
        return csfe(loss_flc, loss_fll).values;
      },
      py::arg("loss_flc"), py::arg("loss_fll"),
      "Cumulative sum of loss_flc - loss_fll");

  m.def(
      "gw_test",
      [](const std::vector<double>& loss_fll,
         const std::vector<double>& loss_flc) {
        auto res = gw_test(loss_fll, loss_flc);
        py::dict out;
        out["statistic"] = res.statistic;
        out["df"] = res.degrees_of_freedom;
        out["p_value"] = res.p_value;
        out["mean_loss_diff"] = res.mean_loss_diff;
        out["n"] = res.n_used;
        out["degenerate"] = res.degenerate;
        return out;
      },
      py::arg("loss_fll"), py::arg("loss_flc"));
}
