#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scheq/dynamics.hpp"
#include "scheq/meander.hpp"
#include "scheq/measures.hpp"
#include "scheq/nonlinearity.hpp"
#include "scheq/reflection.hpp"
#include "scheq/spectral.hpp"
#include "scheq/verification.hpp"

namespace py = pybind11;
using namespace scheq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

py::dict estimate_dict(const MCEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["stderr"] = e.std_error;
  d["ess"] = e.ess;
  d["count"] = e.count;
  d["seed"] = e.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solver, Gibbs measures and meander samplers";

  py::enum_<NonlinKind>(m, "NonlinKind").value("Log", NonlinKind::Log).value("Power", NonlinKind::Power);
  py::class_<NonlinSpec>(m, "NonlinSpec")
      .def_static("log", &NonlinSpec::log)
      .def_static("power", &NonlinSpec::power, py::arg("alpha"))
      .def_static("parse", &parse_spec, py::arg("text"))
      .def_readonly("kind", &NonlinSpec::kind)
      .def_readonly("alpha", &NonlinSpec::alpha)
      .def_property_readonly("label", &NonlinSpec::label)
      .def("__repr__", [](const NonlinSpec& s) { return "NonlinSpec('" + s.label() + "')"; });

  m.def("f_reg", py::vectorize([](NonlinSpec s, int n, double x) { return f_reg(s, n, x); }),
        py::arg("spec"), py::arg("n"), py::arg("x"));
  m.def("F_reg_anti", py::vectorize([](NonlinSpec s, int n, double x) { return F_reg_anti(s, n, x); }),
        py::arg("spec"), py::arg("n"), py::arg("x"));
  m.def("lipschitz", &lipschitz, py::arg("spec"), py::arg("n"));

  m.def("eigenvalue", &eigenvalue, py::arg("i"));
  m.def(
      "to_grid", [](const Array& c, std::size_t M) { return to_array(to_grid(SpectralField(to_vec(c)), M).values); },
      py::arg("coeffs"), py::arg("M"));
  m.def(
      "to_spectral", [](const Array& g, std::size_t N) { return to_array(to_spectral(GridField(to_vec(g)), N).coeffs); },
      py::arg("grid"), py::arg("N"));
  m.def(
      "norm_gamma", [](double gamma, const Array& c) { return norm_gamma(gamma, SpectralField(to_vec(c))).seminorm; },
      py::arg("gamma"), py::arg("coeffs"));

  m.def(
      "simulate",
      [](const Array& x0, double dt, double T, const NonlinSpec& spec, int n, std::size_t M, std::uint64_t seed,
         std::size_t stride, bool nonlinear) {
        SimConfig c;
        std::vector<double> a = to_vec(x0);
        c.N = a.size();
        c.M = M;
        c.dt = dt;
        c.T = T;
        c.spec = spec;
        c.n = n;
        c.c = a.empty() ? 0.0 : a[0];
        c.seed = seed;
        c.nonlinear = nonlinear;
        Stream rng(seed, "python/simulate", 0);
        Trajectory tr = simulate(SpectralField(a), c, rng, stride);
        py::array_t<double> states({tr.states.size(), c.N});
        auto s = states.mutable_unchecked<2>();
        for (std::size_t k = 0; k < tr.states.size(); ++k)
          for (std::size_t i = 0; i < c.N; ++i) s(k, i) = tr.states[k][i];
        return py::make_tuple(to_array(tr.times), states);
      },
      py::arg("x0"), py::arg("dt"), py::arg("T"), py::arg("spec") = NonlinSpec::log(), py::arg("n") = 8,
      py::arg("M") = 128, py::arg("seed") = 1, py::arg("stride") = 1, py::arg("nonlinear") = true,
      "Returns (times, states) with states[k] the N coefficients at times[k].");

  m.def(
      "sample_mu_c",
      [](double c, std::size_t M, std::uint64_t seed, std::size_t index) {
        Stream rng(seed, "python/mu_c", index);
        return to_array(sample_mu_c(c, M, rng).values);
      },
      py::arg("c"), py::arg("M") = 128, py::arg("seed") = 1, py::arg("index") = 0);
  m.def(
      "estimate_Z",
      [](double c, const NonlinSpec& spec, int n, std::size_t count, std::size_t M, std::uint64_t seed) {
        SamplerOptions o;
        o.M = M;
        o.seed = seed;
        return estimate_dict(estimate_Z(c, spec, n, count, o));
      },
      py::arg("c"), py::arg("spec"), py::arg("n"), py::arg("count"), py::arg("M") = 128, py::arg("seed") = 1);

  m.def(
      "sample_meander",
      [](std::size_t grid_size, std::uint64_t seed, std::size_t index) {
        Stream rng(seed, "python/meander", index);
        MeanderPath p = sample_meander(grid_size, rng);
        return py::make_tuple(to_array(p.times), to_array(p.values), p.weight);
      },
      py::arg("grid_size"), py::arg("seed") = 1, py::arg("index") = 0,
      "Returns (times, values, imhof_weight).");
  m.def(
      "J_r_n_scan",
      [](double r, const NonlinSpec& spec, const std::vector<int>& n_grid, std::size_t count, std::size_t M,
         std::uint64_t seed) {
        py::list out;
        for (const auto& e : J_r_n_scan(r, spec, n_grid, count, M, seed)) out.append(estimate_dict(e));
        return out;
      },
      py::arg("r"), py::arg("spec"), py::arg("n_grid"), py::arg("count"), py::arg("M") = 128, py::arg("seed") = 1);

  m.def(
      "generator_apply",
      [](const Array& h, const Array& x, const NonlinSpec& spec, int n, std::size_t M) {
        auto [re, im] = generator_apply(SpectralField(to_vec(h)), SpectralField(to_vec(x)), spec, n, M);
        return std::complex<double>(re, im);
      },
      py::arg("h"), py::arg("x"), py::arg("spec"), py::arg("n"), py::arg("M") = 128);

  m.def("contact_bound", &contact_bound, py::arg("spec"), py::arg("eps"), py::arg("T"), py::arg("gamma") = 1.0);
  m.def(
      "ibp_defect",
      [](const Array& k, double c, const NonlinSpec& spec, std::size_t count, std::size_t M, std::uint64_t seed) {
        ReflectionOptions o;
        o.M = M;
        o.seed = seed;
        DefectEstimate d = ibp_defect(SpectralField(to_vec(k)), c, spec, count, o);
        py::dict r;
        r["plain"] = estimate_dict(d.plain);
        r["estimate"] = estimate_dict(d.estimate);
        r["ess"] = d.ess;
        return r;
      },
      py::arg("k"), py::arg("c"), py::arg("spec"), py::arg("count"), py::arg("M") = 128, py::arg("seed") = 1);
}
