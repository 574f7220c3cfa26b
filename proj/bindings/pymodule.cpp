#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freewalk/errors.hpp"
#include "freewalk/json_io.hpp"
#include "freewalk/series_engine.hpp"
#include "freewalk/singularity.hpp"
#include "freewalk/version.hpp"
#include "freewalk/words.hpp"

namespace py = pybind11;
using namespace freewalk;

namespace {

FactorMeasure factor_from_json_str(const std::string& text) {
  return factor_from_json(json::parse(text));
}

FreeProductConfig make_config(const FactorMeasure& f1, const FactorMeasure& f2, double alpha) {
  return FreeProductConfig{f1, f2, alpha};
}

py::dict solution_dict(const SpectralSolution& sol, const MomentReport& mr) {
  py::dict d;
  const json j = solution_to_json(sol, mr);
  for (const auto& [key, value] : j.items()) {
    if (value.is_number_float()) d[key.c_str()] = value.get<double>();
    else if (value.is_boolean()) d[key.c_str()] = value.get<bool>();
    else if (value.is_string()) d[key.c_str()] = value.get<std::string>();
    else if (value.is_array()) d[key.c_str()] = value.get<std::vector<int>>();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_freewalk, m) {
  m.doc() = "Green functions and critical mixing weights for random walks on "
            "free products Z^d1 * Z^d2";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "FreewalkError");

  py::class_<FactorMeasure>(m, "FactorMeasure")
      .def_readonly("dim", &FactorMeasure::dim)
      .def_readonly("label", &FactorMeasure::label)
      .def_readonly("aperiodic", &FactorMeasure::aperiodic)
      .def_readonly("origin_weight", &FactorMeasure::origin_weight)
      .def("__repr__", [](const FactorMeasure& f) {
        return "<FactorMeasure '" + f.label + "' on Z^" + std::to_string(f.dim) + ">";
      });

  m.def("lazy_srw", &lazy_srw, py::arg("dim"),
        "lazy simple random walk: weight 1/2 at the origin, 1/(4d) per unit step");
  m.def("srw", &srw, py::arg("dim"), "simple random walk (period 2)");
  m.def("factor_from_json", &factor_from_json_str, py::arg("text"),
        "validate a factor measure from its JSON document");

  m.def("theta_of_factor", [](const FactorMeasure& f) { return theta_of_factor(f); },
        py::arg("factor"), "theta_i = G_i(1); raises for d <= 2");

  m.def("green_eval", [](const FactorMeasure& f, double r) {
          const GreenPoint gp = green_eval(f, r);
          return py::make_tuple(gp.G.v, gp.dG.finite ? py::object(py::float_(gp.dG.v)) : py::none(),
                                gp.d2G.finite ? py::object(py::float_(gp.d2G.v)) : py::none());
        },
        py::arg("factor"), py::arg("r"),
        "(G(r), G'(r) or None, G''(r) or None) of the factor walk");

  m.def("return_series", [](const FactorMeasure& f, int n) { return return_series(f, n).c; },
        py::arg("factor"), py::arg("order"), "exact n-step return probabilities");

  m.def("classify", [](const FactorMeasure& f1, const FactorMeasure& f2, double alpha) {
          FreeProductAnalyzer an(make_config(f1, f2, alpha));
          const SpectralSolution& sol = an.classify();
          return solution_dict(sol, an.moments(sol.R));
        },
        py::arg("factor1"), py::arg("factor2"), py::arg("alpha"),
        "trichotomy plus spectral data at the given mixing weight");

  m.def("find_alpha_star", [](const FactorMeasure& f1, const FactorMeasure& f2) {
          const AlphaStarResult res = find_alpha_star(f1, f2);
          FreeProductAnalyzer an(make_config(f1, f2, res.alpha_star));
          py::dict d = solution_dict(res.solution, an.moments(res.solution.R));
          d["alpha_star"] = res.alpha_star;
          d["alpha_c"] = res.alpha_c;
          d["sign_change_count"] = res.sign_change_count;
          return d;
        },
        py::arg("factor1"), py::arg("factor2"),
        "critical mixing weight where Psi(theta_bar) = 0");

  m.def("green_series", [](const FactorMeasure& f1, const FactorMeasure& f2, double alpha, int n) {
          return green_series_freeprod(make_config(f1, f2, alpha), n).c;
        },
        py::arg("factor1"), py::arg("factor2"), py::arg("alpha"), py::arg("order"),
        "free-product return probabilities mu_alpha^{*n}(e)");

  m.def("bfs_oracle", [](const FactorMeasure& f1, const FactorMeasure& f2, double alpha, int n) {
          return bfs_oracle(make_config(f1, f2, alpha), n).c;
        },
        py::arg("factor1"), py::arg("factor2"), py::arg("alpha"), py::arg("n_max"),
        "exact word-walk return probabilities, n_max <= 12");

  m.def("monte_carlo", [](const FactorMeasure& f1, const FactorMeasure& f2, double alpha,
                          int n, long long trials, std::uint64_t seed, int threads) {
          const McReport rep = monte_carlo(make_config(f1, f2, alpha), n, trials, seed, threads);
          py::dict d;
          d["n"] = rep.n;
          d["trials"] = rep.trials;
          d["seed"] = rep.seed;
          d["estimate"] = rep.estimate;
          d["stderr"] = rep.stderr_est;
          return d;
        },
        py::arg("factor1"), py::arg("factor2"), py::arg("alpha"), py::arg("n"),
        py::arg("trials"), py::arg("seed") = 1, py::arg("threads") = 1,
        "reproducible counter-based Monte Carlo estimate of mu^{*n}(e)");

  m.def("tauberian_exponents", [](const std::vector<double>& coeffs, double R) {
          CoefficientSeries s;
          s.c = coeffs;
          const TauberianReport rep = tauberian_fit(s, R);
          py::dict d;
          d["a_b0"] = rep.fixed_b0.exponent_a;
          d["a_bhalf"] = rep.fixed_bhalf.exponent_a;
          d["preferred"] = rep.preferred;
          d["window_stable"] = rep.window_stable;
          return d;
        },
        py::arg("coefficients"), py::arg("R"),
        "trailing-window exponent fit of log(c_n R^n)");
}
