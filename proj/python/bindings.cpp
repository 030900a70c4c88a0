// Python bindings: mfvolterra._core

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfvolterra/analysis.hpp"
#include "mfvolterra/config.hpp"
#include "mfvolterra/covariance.hpp"
#include "mfvolterra/errors.hpp"
#include "mfvolterra/kernel.hpp"
#include "mfvolterra/simulate.hpp"
#include "mfvolterra/specfun.hpp"
#include "mfvolterra/tanaka.hpp"
#include "mfvolterra/verify.hpp"

namespace py = pybind11;
using namespace mfv;

namespace {

QuadratureSpec quad(double abs_tol, double rel_tol, int max_subdivisions) {
  return QuadratureSpec{abs_tol, rel_tol, max_subdivisions};
}

py::dict ensemble_dict(const PathEnsemble& e) {
  py::dict d;
  d["times"] = std::vector<double>(e.grid.times().begin(), e.grid.times().end());
  d["paths"] = e.paths;
  d["method"] = to_string(e.method);
  d["seed"] = e.seed;
  d["hurst"] = e.hurst;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kernel, covariance, simulation and verification for the Volterra multifractional process";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ToleranceError>(m, "ToleranceError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
  py::register_exception<InsufficientSampleError>(m, "InsufficientSampleError", PyExc_RuntimeError);

  m.def("gamma", &gamma_fn, py::arg("x"));
  m.def("beta", &beta_fn, py::arg("p"), py::arg("q"));
  m.def("c_lambda_sq", &c_lambda_sq, py::arg("lam"));
  m.def("c_lambda_inv_sq", &c_lambda_inv_sq, py::arg("lam"));

  py::class_<HurstFunction>(m, "HurstFunction")
      .def_static("constant", &HurstFunction::constant, py::arg("value"))
      .def_static("affine_clamped", &HurstFunction::affine_clamped, py::arg("h0"), py::arg("slope"),
                  py::arg("lo"), py::arg("hi"))
      .def_static("sinusoidal",
                  py::overload_cast<double, double, double, double, double, double>(
                      &HurstFunction::sinusoidal),
                  py::arg("mean"), py::arg("amplitude"), py::arg("omega"), py::arg("phase"),
                  py::arg("lo"), py::arg("hi"))
      .def_static("table", &HurstFunction::table, py::arg("times"), py::arg("values"),
                  py::arg("differentiable") = true)
      .def_static("from_json",
                  [](const std::string& s) { return hurst_from_json(nlohmann::json::parse(s)); })
      .def("__call__", &HurstFunction::operator(), py::arg("t"))
      .def("derivative", &HurstFunction::derivative, py::arg("t"))
      .def_property_readonly("differentiable", &HurstFunction::differentiable)
      .def_property_readonly("lower", &HurstFunction::lower)
      .def_property_readonly("upper", &HurstFunction::upper)
      .def_property_readonly("descriptor", &HurstFunction::descriptor)
      .def("__repr__", [](const HurstFunction& h) { return "<HurstFunction " + h.descriptor() + ">"; });

  m.def("kernel", [](double t, double u, double H) { return volterra_kernel(t, u, H); },
        py::arg("t"), py::arg("u"), py::arg("H"));
  m.def("kernel_dH", [](double t, double u, double H) { return volterra_kernel_dH(t, u, H); },
        py::arg("t"), py::arg("u"), py::arg("H"));
  m.def("phi_bound", &phi_bound, py::arg("s"), py::arg("horizon"), py::arg("a"), py::arg("b"));

  m.def("cross_cov_inner_product",
        [](double t, double s, double l, double lp) { return cross_cov_inner_product(t, s, l, lp); },
        py::arg("t"), py::arg("s"), py::arg("lam"), py::arg("lam_p"));
  m.def("cross_cov_double_integral",
        [](double t, double s, double l, double lp) { return cross_cov_double_integral(t, s, l, lp); },
        py::arg("t"), py::arg("s"), py::arg("lam"), py::arg("lam_p"));
  m.def("variance", &variance, py::arg("t"), py::arg("h"));
  m.def("variance_derivative", &variance_derivative, py::arg("t"), py::arg("h"));
  m.def("increment_second_moment",
        [](double s, double t, const HurstFunction& h) { return increment_second_moment(s, t, h); },
        py::arg("s"), py::arg("t"), py::arg("h"));
  m.def(
      "covariance_matrix",
      [](const std::vector<double>& times, const HurstFunction& h, const std::string& method,
         double abs_tol, double rel_tol, int max_subdivisions) {
        return build_cov_matrix(TimeGrid(times), h, covariance_method_from_string(method),
                                quad(abs_tol, rel_tol, max_subdivisions))
            .entries;
      },
      py::arg("times"), py::arg("h"), py::arg("method") = "gram", py::arg("abs_tol") = 1e-14,
      py::arg("rel_tol") = 1e-11, py::arg("max_subdivisions") = 400);

  m.def(
      "sample_cholesky",
      [](const std::vector<double>& times, const HurstFunction& h, int n_paths, std::uint64_t seed,
         const std::string& method) {
        return ensemble_dict(
            sample_cholesky(TimeGrid(times), h, n_paths, seed, covariance_method_from_string(method)));
      },
      py::arg("times"), py::arg("h"), py::arg("n_paths"), py::arg("seed"),
      py::arg("covariance_method") = "gram");
  m.def(
      "sample_volterra",
      [](const std::vector<double>& times, const HurstFunction& h, int n_sub, int n_paths,
         std::uint64_t seed) {
        return ensemble_dict(sample_volterra(TimeGrid(times), h, n_sub, n_paths, seed));
      },
      py::arg("times"), py::arg("h"), py::arg("n_sub"), py::arg("n_paths"), py::arg("seed"));

  m.def(
      "local_time_binned",
      [](const std::vector<double>& path, const std::vector<double>& times,
         const std::vector<double>& edges, const std::vector<double>& checkpoints) {
        return local_time_binned(path, TimeGrid(times), Bins(edges), checkpoints).density;
      },
      py::arg("path"), py::arg("times"), py::arg("edges"), py::arg("checkpoints"));
  m.def(
      "freedman_diaconis_edges",
      [](const std::vector<double>& values) { return Bins::freedman_diaconis(values).edges(); },
      py::arg("values"));
  m.def(
      "occupation_identity_residual",
      [](const std::vector<double>& path, const std::vector<double>& times,
         const std::function<double(double)>& g, const std::vector<double>& edges) {
        return occupation_identity_residual(path, TimeGrid(times), g, Bins(edges));
      },
      py::arg("path"), py::arg("times"), py::arg("g"), py::arg("edges"));

  m.def(
      "berman_integral",
      [](const HurstFunction& h, double horizon, int n) {
        const auto r = berman_integral(h, horizon, n);
        return py::make_tuple(r.value, r.coarse, r.relative_change);
      },
      py::arg("h"), py::arg("horizon"), py::arg("n"));
  m.def("berman_fbm_exact", &berman_fbm_exact, py::arg("H"), py::arg("horizon"));
  m.def(
      "holder_exponent",
      [](double t0, const HurstFunction& h, const std::vector<double>& eps) {
        return holder_exponent(t0, h, eps).estimate;
      },
      py::arg("t0"), py::arg("h"), py::arg("eps"));
  m.def("lnd_ratio",
        [](const std::vector<double>& t, const HurstFunction& h) { return lnd_ratio(t, h); },
        py::arg("times"), py::arg("h"));
  m.def("lnd_whole_past_bound",
        [](const std::vector<double>& t, const HurstFunction& h) { return lnd_whole_past_bound(t, h); },
        py::arg("times"), py::arg("h"));
  m.def("lnd_integral_lower_bound",
        [](double a, double b) { return lnd_integral_lower_bound(a, b); }, py::arg("a"), py::arg("b"));

  m.def("tanaka_deterministic",
        [](const HurstFunction& h, double a, double eps, double t) {
          return tanaka_deterministic(h, a, eps, t);
        },
        py::arg("h"), py::arg("a"), py::arg("eps"), py::arg("t"));
  m.def(
      "degenerate_variance_case",
      [](double s, double t) {
        const auto r = degenerate_variance_case(s, t);
        py::dict d;
        d["max_unnormalized_deviation"] = r.max_unnormalized_deviation;
        d["max_unnormalized_derivative"] = r.max_unnormalized_derivative;
        d["max_normalized_derivative"] = r.max_normalized_derivative;
        d["unnormalized_constant"] = r.unnormalized_constant;
        d["normalized_varies"] = r.normalized_varies;
        return d;
      },
      py::arg("s"), py::arg("t"));

  m.def(
      "verify",
      [](const std::string& config_json, const std::string& suite) {
        const auto cfg = parse_config(nlohmann::json::parse(config_json));
        return run_verify(cfg, suite).to_json(cfg).dump();
      },
      py::arg("config_json"), py::arg("suite"),
      "Runs one verification suite; returns the report as a JSON string.");
  m.def("suite_names", &suite_names);
}
