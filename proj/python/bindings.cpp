#include "cylscat/direct_solver.hpp"
#include "cylscat/errors.hpp"
#include "cylscat/experiment.hpp"
#include "cylscat/geometry.hpp"
#include "cylscat/inverse.hpp"
#include "cylscat/layer_operators.hpp"
#include "cylscat/specfun.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace cylscat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Oblique-incidence dielectric cylinder: direct solver and shape reconstruction";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("bessel_j", &specfun::bessel_j, py::arg("order"), py::arg("x"));
  m.def("bessel_y", &specfun::bessel_y, py::arg("order"), py::arg("x"));
  m.def("hankel1", &specfun::hankel1, py::arg("order"), py::arg("x"));

  py::class_<TrigPolynomial>(m, "TrigPolynomial")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("a"), py::arg("b"))
      .def_static("constant", &TrigPolynomial::constant, py::arg("value"), py::arg("degree") = 0)
      .def_property_readonly("a", &TrigPolynomial::a)
      .def_property_readonly("b", &TrigPolynomial::b)
      .def_property_readonly("degree", &TrigPolynomial::degree)
      .def("packed", &TrigPolynomial::packed)
      .def("__call__", [](const TrigPolynomial& q, double t) { return q(t); })
      .def("eval", &TrigPolynomial::eval, py::arg("t"), py::arg("order") = 0);

  py::class_<RadialFunction>(m, "RadialFunction")
      .def_static("circle", &RadialFunction::circle, py::arg("radius"))
      .def_static("peanut", &RadialFunction::peanut)
      .def_static("apple", &RadialFunction::apple)
      .def_static("from_trig", &RadialFunction::from_trig)
      .def("rotated", &RadialFunction::rotated, py::arg("angle"))
      .def_readonly("name", &RadialFunction::name)
      .def("__call__", [](const RadialFunction& f, double t) { return f.eval(t).r; });

  py::class_<BoundaryCurve>(m, "BoundaryCurve")
      .def_readonly("n", &BoundaryCurve::n)
      .def_readonly("t", &BoundaryCurve::t)
      .def_readonly("r", &BoundaryCurve::r)
      .def_readonly("x", &BoundaryCurve::x)
      .def_readonly("y", &BoundaryCurve::y)
      .def_readonly("jac", &BoundaryCurve::jac)
      .def_readonly("nx", &BoundaryCurve::nx)
      .def_readonly("ny", &BoundaryCurve::ny)
      .def("perimeter", &BoundaryCurve::perimeter);
  m.def("curve_from_radial",
        py::overload_cast<const RadialFunction&, int>(&curve_from_radial), py::arg("radial"),
        py::arg("n"));

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def_readonly("eps0", &PhysicalParams::eps0)
      .def_readonly("mu0", &PhysicalParams::mu0)
      .def_readonly("eps1", &PhysicalParams::eps1)
      .def_readonly("mu1", &PhysicalParams::mu1)
      .def_readonly("omega", &PhysicalParams::omega)
      .def_readonly("theta", &PhysicalParams::theta)
      .def_readwrite("phi", &PhysicalParams::phi)
      .def_readonly("k0", &PhysicalParams::k0)
      .def_readonly("beta", &PhysicalParams::beta)
      .def_readonly("kappa0", &PhysicalParams::kappa0)
      .def_readonly("kappa1", &PhysicalParams::kappa1);
  m.def("derive_params", &derive_params, py::arg("eps0"), py::arg("mu0"), py::arg("eps1"),
        py::arg("mu1"), py::arg("omega"), py::arg("theta"), py::arg("phi") = 0.0);

  py::class_<OperatorSet>(m, "OperatorSet")
      .def_readonly("kappa", &OperatorSet::kappa)
      .def_readonly("S", &OperatorSet::S)
      .def_readonly("D", &OperatorSet::D)
      .def_readonly("NS", &OperatorSet::NS)
      .def_readonly("ND", &OperatorSet::ND)
      .def_readonly("TS", &OperatorSet::TS)
      .def_readonly("TD", &OperatorSet::TD);
  m.def("assemble_operators", &assemble_operators, py::arg("curve"), py::arg("kappa"));

  py::class_<FarFieldPattern>(m, "FarFieldPattern")
      .def(py::init<>())
      .def_readwrite("obs_angles", &FarFieldPattern::obs_angles)
      .def_readwrite("e_inf", &FarFieldPattern::e_inf)
      .def_readwrite("h_inf", &FarFieldPattern::h_inf);
  m.def("equidistant_angles", &equidistant_angles, py::arg("count"));
  m.def(
      "simulate_farfield",
      [](const RadialFunction& radial, int n, const PhysicalParams& p,
         const Eigen::VectorXd& obs) { return simulate_farfield(radial, n, p, obs); },
      py::arg("radial"), py::arg("n"), py::arg("params"), py::arg("obs_angles"));
  m.def("oracle_circle_farfield", &oracle_circle_farfield, py::arg("radius"), py::arg("params"),
        py::arg("obs_angles"));
  m.def("add_noise", &add_noise, py::arg("pattern"), py::arg("delta1"), py::arg("delta2"),
        py::arg("seed"));
  m.def("relative_l2", &relative_l2, py::arg("a"), py::arg("reference"));

  py::class_<RegularizationConfig>(m, "RegularizationConfig")
      .def(py::init<>())
      .def_readwrite("degree", &RegularizationConfig::degree)
      .def_readwrite("sobolev_p", &RegularizationConfig::sobolev_p)
      .def_readwrite("lambda0", &RegularizationConfig::lambda0)
      .def_readwrite("decay", &RegularizationConfig::decay)
      .def_readwrite("max_iter", &RegularizationConfig::max_iter)
      .def_readwrite("stop_tol", &RegularizationConfig::stop_tol);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("k", &IterationRecord::k)
      .def_readonly("radial", &IterationRecord::radial)
      .def_readonly("lambda_", &IterationRecord::lambda)
      .def_readonly("misfit", &IterationRecord::misfit)
      .def_readonly("update_norm", &IterationRecord::update_norm);

  py::class_<ReconstructionResult>(m, "ReconstructionResult")
      .def_readonly("initial", &ReconstructionResult::initial)
      .def_readonly("final_radial", &ReconstructionResult::final_radial)
      .def_readonly("history", &ReconstructionResult::history)
      .def_readonly("stop_reason", &ReconstructionResult::stop_reason)
      .def_readonly("failure", &ReconstructionResult::failure);

  m.def(
      "reconstruct",
      [](const PhysicalParams& params, const std::vector<std::pair<double, FarFieldPattern>>& data,
         const RegularizationConfig& config, double r0, const std::string& variant,
         int n_inverse) {
        std::vector<Illumination> ills;
        for (const auto& [phi, pattern] : data) ills.push_back({phi, pattern});
        return reconstruct(params, ills, config, TrigPolynomial::constant(r0),
                           parse_variant(variant), n_inverse);
      },
      py::arg("params"), py::arg("data"), py::arg("config"), py::arg("r0"),
      py::arg("variant") = "combined", py::arg("n_inverse") = 32,
      "data: list of (phi, FarFieldPattern) per illumination.");

  m.def(
      "radial_error",
      [](const TrigPolynomial& rec, const RadialFunction& truth) {
        const RadialError e = radial_error(RadialFunction::from_trig(rec), truth);
        return std::make_pair(e.relative_l2, e.sup);
      },
      py::arg("reconstruction"), py::arg("truth"), "(relative L2, sup) on a 512-point grid.");

  py::class_<RunConfig>(m, "RunConfig")
      .def_static("from_json", &parse_run_config, py::arg("text"))
      .def_static("load", [](const std::string& p) { return load_run_config(p); }, py::arg("path"))
      .def("to_json", [](const RunConfig& c) { return to_json(c); })
      .def("set", &apply_override, py::arg("key"), py::arg("value"))
      .def("validate", &RunConfig::validate)
      .def_readwrite("name", &RunConfig::name);

  m.def(
      "run_direct",
      [](const RunConfig& c, const std::filesystem::path& out) {
        std::vector<std::string> files;
        for (const auto& f : run_direct(c, out).files) files.push_back(f.string());
        return files;
      },
      py::arg("config"), py::arg("out_dir"));
  m.def(
      "run_invert",
      [](const RunConfig& c, const std::vector<std::filesystem::path>& files,
         const std::filesystem::path& out) { return run_invert(c, files, out).summary_json; },
      py::arg("config"), py::arg("data_files"), py::arg("out_dir"),
      "Returns the summary JSON text.");

  m.def(
      "validate",
      [](int n) {
        ValidateOptions opt;
        opt.n = n;
        std::vector<std::tuple<std::string, double, double, bool>> out;
        for (const CheckResult& c : run_validation(opt))
          out.emplace_back(c.name, c.value, c.tolerance, c.passed);
        return out;
      },
      py::arg("n") = 64);
}
