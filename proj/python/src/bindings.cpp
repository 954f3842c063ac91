#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spdelab/bernstein.hpp"
#include "spdelab/kernels.hpp"
#include "spdelab/lpaley.hpp"
#include "spdelab/metric.hpp"
#include "spdelab/parallel.hpp"
#include "spdelab/spde.hpp"
#include "spdelab/symbols.hpp"

namespace py = pybind11;
using namespace spdelab;

namespace {

py::object as_dict(const CheckReport& rep) {
  return py::module_::import("json").attr("loads")(rep.to_json().dump());
}

py::array_t<double> field_array(const ScalarField& f) {
  py::array_t<double> out({static_cast<py::ssize_t>(f.grid.steps()), static_cast<py::ssize_t>(f.grid.points())});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Symbols, kernels, quasi-metrics and stochastic convolutions for parabolic pseudo-differential equations";

  py::register_exception<Error>(m, "SpdelabError", PyExc_ValueError);

  m.def("set_worker_count", &set_worker_count, py::arg("workers"));
  m.def("worker_count", &worker_count);

  py::class_<SpaceTimeGrid>(m, "Grid")
      .def(py::init<double, int, int, double, int>(), py::arg("L"), py::arg("n"), py::arg("d") = 1,
           py::arg("T") = 1.0, py::arg("n_t") = 1)
      .def_property_readonly("L", &SpaceTimeGrid::half_width)
      .def_property_readonly("n", &SpaceTimeGrid::n)
      .def_property_readonly("d", &SpaceTimeGrid::dim)
      .def_property_readonly("T", &SpaceTimeGrid::horizon)
      .def_property_readonly("n_t", &SpaceTimeGrid::steps)
      .def_property_readonly("dx", &SpaceTimeGrid::dx)
      .def_property_readonly("dt", &SpaceTimeGrid::dt)
      .def_property_readonly("points", &SpaceTimeGrid::points)
      .def("refined", &SpaceTimeGrid::refined)
      .def("coordinates", [](const SpaceTimeGrid& g) {
        py::array_t<double> out({static_cast<py::ssize_t>(g.points()), static_cast<py::ssize_t>(g.dim())});
        double* p = out.mutable_data();
        for (std::size_t q = 0; q < g.points(); ++q)
          for (double c : g.coordinate(q)) *p++ = c;
        return out;
      });

  py::class_<Symbol>(m, "Symbol")
      .def_property_readonly("id", &Symbol::id)
      .def_property_readonly("dim", &Symbol::dim)
      .def_property_readonly("order", &Symbol::order)
      .def_property_readonly("ellipticity", &Symbol::ellipticity)
      .def_property_readonly("has_closed_form_integral", &Symbol::has_closed_form_integral)
      .def(
          "__call__", [](const Symbol& s, double t, std::vector<double> xi) { return s(t, xi); }, py::arg("t"),
          py::arg("xi"))
      .def(
          "time_integral",
          [](const Symbol& s, double a, double b, std::vector<double> xi) { return s.time_integral(a, b, xi); },
          py::arg("s"), py::arg("t"), py::arg("xi"))
      .def("__repr__", [](const Symbol& s) { return "<Symbol " + s.id() + ">"; });
  m.def("symbol", &symbol_from_id, py::arg("id"), py::arg("d") = 1);

  py::class_<BernsteinFunction>(m, "BernsteinFunction")
      .def("__call__", &BernsteinFunction::operator(), py::arg("lam"))
      .def_property_readonly("label", &BernsteinFunction::label)
      .def_property_readonly("exponents",
                             [](const BernsteinFunction& f) -> py::object {
                               if (!f.claim()) return py::none();
                               return py::make_tuple(f.claim()->lower, f.claim()->upper);
                             })
      .def("__repr__", [](const BernsteinFunction& f) { return "<BernsteinFunction " + f.label() + ">"; });
  m.def("bernstein", &bernstein_from_id, py::arg("id"));
  m.def("generalized_inverse", &generalized_inverse, py::arg("phi"), py::arg("t"));
  m.def("log_grid", &log_grid, py::arg("lo"), py::arg("hi"), py::arg("points"));
  m.def(
      "scaling_check", [](const BernsteinFunction& f, const std::vector<double>& g) { return as_dict(scaling_check(f, g)); },
      py::arg("phi"), py::arg("grid"));
  m.def(
      "bernstein_invariants", [](const BernsteinFunction& f) { return as_dict(bernstein_invariants(f)); },
      py::arg("phi"));

  m.def(
      "check_ellipticity",
      [](const Symbol& s, const std::vector<double>& ts, const std::vector<std::vector<double>>& xi) {
        return as_dict(check_ellipticity(s, ts, xi));
      },
      py::arg("symbol"), py::arg("t_samples"), py::arg("xi_grid"));
  m.def("frequency_sample_grid", &frequency_sample_grid, py::arg("d"), py::arg("r_min"), py::arg("r_max"),
        py::arg("radii"), py::arg("directions"));

  m.def(
      "kernel_field",
      [](const Symbol& s, double a, double b, const SpaceTimeGrid& g) {
        const KernelField kf = kernel_field(s, a, b, g);
        std::vector<double> re(kf.values.size());
        for (std::size_t q = 0; q < re.size(); ++q) re[q] = kf.values[q].real();
        py::array_t<double> out(static_cast<py::ssize_t>(re.size()), re.data());
        return out;
      },
      py::arg("symbol"), py::arg("s"), py::arg("t"), py::arg("grid"));
  m.def(
      "check_scaling_relations",
      [](const Symbol& s, double a, double b, const SpaceTimeGrid& g) {
        return as_dict(check_scaling_relations(s, a, b, g));
      },
      py::arg("symbol"), py::arg("s"), py::arg("t"), py::arg("grid"));
  m.def(
      "verify_kernel_lemma",
      [](const Symbol& s, const SpaceTimeGrid& g, const std::string& lemma) {
        return as_dict(verify_kernel_lemma(s, g, lemma, default_lemma_sweep(lemma, g)));
      },
      py::arg("symbol"), py::arg("grid"), py::arg("lemma"));

  py::class_<QuasiMetric>(m, "QuasiMetric")
      .def_property_readonly("label", &QuasiMetric::label)
      .def_property_readonly("triangle_constant", &QuasiMetric::triangle_constant)
      .def_property_readonly("hormander_constant", &QuasiMetric::hormander_constant)
      .def("time_part", &QuasiMetric::time_part, py::arg("gap"))
      .def(
          "__call__",
          [](const QuasiMetric& rho, double t, std::vector<double> x, double s, std::vector<double> y) {
            return rho(SpaceTimePoint{t, std::move(x)}, SpaceTimePoint{s, std::move(y)});
          },
          py::arg("t"), py::arg("x"), py::arg("s"), py::arg("y"))
      .def("override_hormander_constant", &QuasiMetric::override_hormander_constant, py::arg("c0"));
  m.def("parabolic_metric", &parabolic_metric, py::arg("gamma"));
  m.def("subordinate_metric", &subordinate_metric, py::arg("phi"));
  m.def(
      "hormander_sup_estimate",
      [](const Symbol& s, const QuasiMetric& rho, double T, const SpaceTimeGrid& g, int scales, int pairs,
         std::uint64_t seed) {
        PairSampler sampler;
        sampler.scales = scales;
        sampler.pairs_per_scale = pairs;
        sampler.seed = seed;
        return as_dict(hormander_sup_estimate(s, rho, sampler, T, g));
      },
      py::arg("symbol"), py::arg("rho"), py::arg("T"), py::arg("grid"), py::arg("scales") = 8, py::arg("pairs") = 4,
      py::arg("seed") = 1);

  m.def(
      "verify_lpaley",
      [](const Symbol& s, const std::vector<double>& ps, const SpaceTimeGrid& g, int modes, std::uint64_t seed) {
        return as_dict(verify_lpaley(s, lpaley_battery(s, modes, seed), ps, g));
      },
      py::arg("symbol"), py::arg("p_list"), py::arg("grid"), py::arg("modes") = 2, py::arg("seed") = 1);

  py::class_<NoiseEnsemble>(m, "NoiseEnsemble")
      .def(py::init<std::uint64_t, std::size_t, int, int, double>(), py::arg("seed"), py::arg("paths"),
           py::arg("modes"), py::arg("steps"), py::arg("T"))
      .def_property_readonly("paths", &NoiseEnsemble::paths)
      .def("increments", [](const NoiseEnsemble& n, std::size_t path) {
        const auto v = n.increments(path);
        py::array_t<double> out({static_cast<py::ssize_t>(n.steps()), static_cast<py::ssize_t>(n.modes())});
        std::copy(v.begin(), v.end(), out.mutable_data());
        return out;
      });
  py::class_<AdaptedProcess>(m, "AdaptedProcess")
      .def_readonly("id", &AdaptedProcess::id)
      .def_readonly("times", &AdaptedProcess::times)
      .def_readonly("modes", &AdaptedProcess::modes);
  m.def("spde_battery", &spde_battery, py::arg("grid"), py::arg("modes"), py::arg("seed"), py::arg("count") = 10);
  m.def(
      "stochastic_convolution",
      [](const Symbol& s, const AdaptedProcess& g, const NoiseEnsemble& n, const SpaceTimeGrid& grid,
         std::size_t path, bool half_power) {
        const auto post = half_power ? half_power_multiplier(s, grid) : std::vector<Cplx>{};
        return field_array(stochastic_convolution(s, g, n, grid, post, path));
      },
      py::arg("symbol"), py::arg("g"), py::arg("noise"), py::arg("grid"), py::arg("path"),
      py::arg("half_power") = true);
  m.def(
      "ito_isometry_check",
      [](const Symbol& s, const AdaptedProcess& g, const NoiseEnsemble& n, const SpaceTimeGrid& grid, double t) {
        return as_dict(ito_isometry_check(s, g, n, grid, t));
      },
      py::arg("symbol"), py::arg("g"), py::arg("noise"), py::arg("grid"), py::arg("t_eval"));
  m.def(
      "lp_ratio_estimate",
      [](const Symbol& s, const std::vector<AdaptedProcess>& b, const NoiseEnsemble& n, const SpaceTimeGrid& grid,
         double p, bool refine) {
        RatioOptions opt;
        opt.refine = refine;
        return as_dict(lp_ratio_estimate(s, b, n, grid, p, opt));
      },
      py::arg("symbol"), py::arg("battery"), py::arg("noise"), py::arg("grid"), py::arg("p"),
      py::arg("refine") = true);
}
