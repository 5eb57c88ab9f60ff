#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "ovsafe/barrier.hpp"
#include "ovsafe/io.hpp"
#include "ovsafe/mc.hpp"
#include "ovsafe/model.hpp"
#include "ovsafe/ode.hpp"
#include "ovsafe/sde.hpp"

namespace py = pybind11;
using namespace ovsafe;

namespace {

py::array_t<double> column(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> states_array(const std::vector<State>& s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{2}});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < s.size(); ++i) {
    m(i, 0) = s[i].x;
    m(i, 1) = s[i].y;
  }
  return out;
}

State to_state(std::pair<double, double> z) { return {z.first, z.second}; }

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_ovsafe, m) {
  m.doc() = "Stochastic optimal-velocity car-following model with collision analysis";
  m.attr("__version__") = io::version();

  py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double alpha, double beta, double d, double v_circ, double x_circ,
                       double y_circ) {
             return ModelParams{alpha, beta, d, v_circ, x_circ, y_circ};
           }),
           py::arg("alpha"), py::arg("beta"), py::arg("d"), py::arg("v_circ"),
           py::arg("x_circ"), py::arg("y_circ"))
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("v_circ", &ModelParams::v_circ)
      .def_readwrite("x_circ", &ModelParams::x_circ)
      .def_readwrite("y_circ", &ModelParams::y_circ)
      .def("to_dict", [](const ModelParams& p) { return json_to_py(io::to_json(p)); });

  py::class_<DerivedConstants>(m, "DerivedConstants")
      .def_readonly("x_inf", &DerivedConstants::x_inf)
      .def_readonly("x_minus", &DerivedConstants::x_minus)
      .def_readonly("h_circ", &DerivedConstants::h_circ)
      .def_readonly("x_bar", &DerivedConstants::x_bar)
      .def_readonly("y_bar", &DerivedConstants::y_bar)
      .def_readonly("x_dagger", &DerivedConstants::x_dagger)
      .def_readonly("phi_lower", &DerivedConstants::phi_lower)
      .def_readonly("varpi_dagger", &DerivedConstants::varpi_dagger)
      .def_readonly("delta_bar", &DerivedConstants::delta_bar)
      .def("to_dict", [](const DerivedConstants& c) { return json_to_py(io::to_json(c)); });

  py::class_<Model>(m, "Model")
      .def(py::init<const ModelParams&>(), py::arg("params"))
      .def_property_readonly("params", &Model::params)
      .def_property_readonly("derived", &Model::derived)
      .def("potential", &Model::potential, py::arg("x"))
      .def("hamiltonian", [](const Model& mdl, double x, double y) {
        return mdl.hamiltonian({x, y});
      }, py::arg("x"), py::arg("y"))
      .def("drift", [](const Model& mdl, double x, double y) {
        const Tangent t = mdl.drift({x, y});
        return std::pair{t.dx, t.dy};
      }, py::arg("x"), py::arg("y"))
      .def("drift_regularized", [](const Model& mdl, double x, double y, double delta) {
        const Tangent t = mdl.drift_regularized({x, y}, delta);
        return std::pair{t.dx, t.dy};
      }, py::arg("x"), py::arg("y"), py::arg("delta"));

  m.def("optimal_velocity", &optimal_velocity, py::arg("u"));
  m.def("working_delta", &working_delta, py::arg("model"));

  m.def(
      "integrate_deterministic",
      [](const Model& mdl, std::pair<double, double> z0, double horizon, double rtol,
         double atol) {
        StepControl ctl;
        ctl.rtol = rtol;
        ctl.atol = atol;
        const Trajectory tr = integrate_deterministic(to_state(z0), mdl, horizon, ctl);
        py::dict d;
        d["t"] = column(tr.times);
        d["z"] = states_array(tr.states);
        d["H"] = column(tr.h_values);
        d["status"] = std::string(to_string(tr.status));
        d["fault"] = tr.fault;
        return d;
      },
      py::arg("model"), py::arg("z0"), py::arg("horizon") = 200.0, py::arg("rtol") = 1e-9,
      py::arg("atol") = 1e-11);

  py::class_<BarrierTable>(m, "BarrierTable")
      .def_readonly("phi_lower", &BarrierTable::phi_lower)
      .def_readonly("deriv_bound", &BarrierTable::deriv_bound)
      .def_readonly("analytic_deriv_bound", &BarrierTable::analytic_deriv_bound)
      .def_readonly("y_bar", &BarrierTable::y_bar)
      .def_property_readonly("y", [](const BarrierTable& t) { return column(t.y_grid); })
      .def_property_readonly("phi_values", [](const BarrierTable& t) { return column(t.phi_vals); })
      .def("phi", &BarrierTable::phi, py::arg("y"))
      .def("dphi", &BarrierTable::dphi, py::arg("y"))
      .def("d2phi", &BarrierTable::d2phi, py::arg("y"))
      .def("danger", [](const BarrierTable& t, double x, double y) { return danger({x, y}, t); },
           py::arg("x"), py::arg("y"))
      .def("constants", [](const BarrierTable& t) { return json_to_py(io::barrier_constants_json(t)); });

  m.def("build_barrier", &build_barrier, py::arg("model"), py::arg("grid_resolution") = 10000);
  m.def(
      "drift_sign_functional",
      [](const Model& mdl, const BarrierTable& t, double x, double y) {
        return drift_sign_functional({x, y}, t, mdl);
      },
      py::arg("model"), py::arg("table"), py::arg("x"), py::arg("y"));

  m.def(
      "simulate_path",
      [](const Model& mdl, std::pair<double, double> z0, double epsilon, double delta, double dt,
         double horizon, std::uint64_t seed, std::uint64_t trial_index, std::size_t stride) {
        SdePathConfig cfg;
        cfg.epsilon = epsilon;
        cfg.delta = delta;
        cfg.dt = dt;
        cfg.horizon = horizon;
        cfg.seed = seed;
        cfg.trial_index = trial_index;
        cfg.stride = stride;
        PathResult r;
        {
          py::gil_scoped_release release;
          r = simulate_path(to_state(z0), cfg, mdl);
        }
        py::dict d;
        d["record"] = json_to_py(io::to_json(r.record));
        d["t"] = column(r.path.times);
        d["z"] = states_array(r.path.states);
        d["H"] = column(r.path.h_values);
        return d;
      },
      py::arg("model"), py::arg("z0"), py::arg("epsilon"), py::arg("delta"),
      py::arg("dt") = 1e-3, py::arg("horizon") = 10.0, py::arg("seed") = 0,
      py::arg("trial_index") = 0, py::arg("stride") = 10);

  m.def(
      "run_sweep",
      [](const Model& mdl, std::vector<double> epsilons, std::vector<double> horizons,
         std::size_t trials_per_cell, std::uint64_t base_seed, double dt,
         std::pair<double, double> z0, unsigned threads) {
        SweepSpec spec;
        spec.epsilons = std::move(epsilons);
        spec.horizons = std::move(horizons);
        spec.trials_per_cell = trials_per_cell;
        spec.base_seed = base_seed;
        spec.dt = dt;
        spec.params = mdl.params();
        spec.z0 = to_state(z0);
        SweepResult res;
        {
          py::gil_scoped_release release;
          const BarrierTable table = build_barrier(mdl);
          res = run_sweep(spec, table, threads);
        }
        py::list cells;
        for (const CellResult& c : res.cells) cells.append(json_to_py(io::to_json(c)));
        return cells;
      },
      py::arg("model"), py::arg("epsilons"), py::arg("horizons"),
      py::arg("trials_per_cell") = 10000, py::arg("base_seed") = 0, py::arg("dt") = 1e-3,
      py::arg("z0") = std::pair{1.0, 0.0}, py::arg("threads") = 0);

  m.def(
      "wilson_interval",
      [](std::size_t k, std::size_t n) {
        const WilsonInterval w = wilson_interval(k, n);
        return py::make_tuple(w.lower, w.upper, w.halfwidth);
      },
      py::arg("successes"), py::arg("n"));
}
