#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nhsoc/config.hpp"
#include "nhsoc/error.hpp"
#include "nhsoc/experiment.hpp"
#include "nhsoc/nat.hpp"

namespace py = pybind11;
using namespace nhsoc;

namespace {

InitialState to_initial(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) {
    const auto s = obj.cast<std::string>();
    if (s == "lower") return Band::Lower;
    if (s == "upper") return Band::Upper;
    throw Error(ErrorCode::InvalidInput, "initial must be 'lower', 'upper' or (c_plus, c_minus)");
  }
  const auto pair = obj.cast<std::pair<Complex, Complex>>();
  return BandCoefficients{pair.first, pair.second};
}

ProtocolParams make_params(double q_start, double q_end, double h, double x_m, ControlPoint origin,
                           double angle, double max_len) {
  return {q_start, q_end, h, x_m, origin, angle, max_len};
}

py::dict spinor_pair(const Spinor& s) { return py::dict(py::arg("up") = s[0], py::arg("down") = s[1]); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Driven non-Hermitian two-band simulator";

  // Owned by the module attributes for the lifetime of the interpreter.
  static PyObject* error_type = py::exception<Error>(m, "NhsocError", PyExc_RuntimeError).ptr();
  static PyObject* config_error_type = py::exception<ConfigError>(m, "ConfigError", PyExc_ValueError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(config_error_type, e.what());
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("code") = std::string(e.name());
      PyErr_SetObject(error_type, err.ptr());
    }
  });

  py::class_<ControlPoint>(m, "ControlPoint")
      .def(py::init<double, double>(), py::arg("q") = 0.0, py::arg("g") = 0.0)
      .def(py::init([](const py::tuple& t) {
        if (t.size() != 2) throw py::value_error("expected (q, g)");
        return ControlPoint{t[0].cast<double>(), t[1].cast<double>()};
      }))
      .def_readwrite("q", &ControlPoint::q)
      .def_readwrite("g", &ControlPoint::g)
      .def("__iter__", [](const ControlPoint& p) { return py::iter(py::make_tuple(p.q, p.g)); })
      .def("__eq__", [](const ControlPoint& a, const ControlPoint& b) { return a == b; })
      .def("__repr__", [](const ControlPoint& p) {
        return "ControlPoint(q=" + py::repr(py::float_(p.q)).cast<std::string>() +
               ", g=" + py::repr(py::float_(p.g)).cast<std::string>() + ")";
      });
  py::implicitly_convertible<py::tuple, ControlPoint>();

  py::class_<Model>(m, "Model")
      .def(py::init([](double kappa, double ep_tolerance) { return Model{kappa, ep_tolerance}; }),
           py::arg("kappa") = 1.0, py::arg("ep_tolerance") = 1e-9)
      .def_readwrite("kappa", &Model::kappa)
      .def_readwrite("ep_tolerance", &Model::ep_tolerance);

  py::class_<Eigensystem>(m, "Eigensystem")
      .def_readonly("delta_e", &Eigensystem::delta_e)
      .def_readonly("e_plus", &Eigensystem::e_plus)
      .def_readonly("e_minus", &Eigensystem::e_minus)
      .def_readonly("theta", &Eigensystem::theta)
      .def_readonly("psi_plus", &Eigensystem::psi_plus)
      .def_readonly("psi_minus", &Eigensystem::psi_minus)
      .def_readonly("phi_plus", &Eigensystem::phi_plus)
      .def_readonly("phi_minus", &Eigensystem::phi_minus);

  m.def(
      "hamiltonian",
      [](ControlPoint p, double kappa) {
        const auto h = build_hamiltonian(p, kappa);
        return std::vector<std::vector<Complex>>{{h.h11, h.h12}, {h.h21, h.h22}};
      },
      py::arg("point"), py::arg("kappa") = 1.0, "2x2 Hamiltonian as nested lists.");
  m.def("half_gap", &half_gap, py::arg("point"), py::arg("kappa") = 1.0);
  m.def("eigensystem", &eigensystem, py::arg("point"), py::arg("model") = Model{});
  m.def("spin_polarization", py::overload_cast<const Spinor&>(&spin_polarization), py::arg("state"));

  py::class_<Velocity>(m, "Velocity")
      .def_readonly("v_q", &Velocity::v_q)
      .def_readonly("v_g", &Velocity::v_g)
      .def("vartheta", &Velocity::vartheta)
      .def("magnitude", &Velocity::magnitude);

  py::class_<Path>(m, "Path")
      .def(py::init<std::vector<ControlPoint>, double>(), py::arg("waypoints"), py::arg("speed"))
      .def_property_readonly("waypoints", &Path::waypoints)
      .def_property_readonly("speed", &Path::speed)
      .def_property_readonly("total_length", &Path::total_length)
      .def_property_readonly("total_time", &Path::total_time)
      .def("position_at",
           [](const Path& p, double t) {
             const auto pp = p.at(t);
             return py::make_tuple(pp.point, pp.velocity);
           },
           py::arg("t"))
      .def("reversed", &Path::reversed)
      .def("with_speed", &Path::with_speed, py::arg("speed"));

  py::class_<ProtocolParams>(m, "ProtocolParams")
      .def(py::init(&make_params), py::arg("q_start") = 1.0, py::arg("q_end") = -1.0, py::arg("h") = 1.2,
           py::arg("x_m") = -0.5, py::arg("origin") = ControlPoint{-1.0, 1.0}, py::arg("angle") = 0.0,
           py::arg("max_len") = 2.0)
      .def_readwrite("q_start", &ProtocolParams::q_start)
      .def_readwrite("q_end", &ProtocolParams::q_end)
      .def_readwrite("h", &ProtocolParams::h)
      .def_readwrite("x_m", &ProtocolParams::x_m)
      .def_readwrite("origin", &ProtocolParams::origin)
      .def_readwrite("angle", &ProtocolParams::angle)
      .def_readwrite("max_len", &ProtocolParams::max_len);

  m.def(
      "standard_path",
      [](const std::string& kind, double speed, const std::string& direction, const ProtocolParams& params) {
        return standard_path(parse_protocol_kind(kind), params, parse_direction(direction), speed);
      },
      py::arg("kind"), py::arg("speed"), py::arg("direction") = "ccw", py::arg("params") = ProtocolParams{},
      "hermitian | loop | spike | ray; direction ccw|negative or cw|positive.");

  py::class_<BandCoefficients>(m, "BandCoefficients")
      .def(py::init([](Complex p, Complex q) { return BandCoefficients{p, q}; }), py::arg("c_plus"),
           py::arg("c_minus"))
      .def_readonly("c_plus", &BandCoefficients::c_plus)
      .def_readonly("c_minus", &BandCoefficients::c_minus);

  m.def("project", &project, py::arg("state"), py::arg("eig"));
  m.def(
      "band_index",
      [](Complex c_plus, Complex c_minus, const Eigensystem& eig) {
        return band_observables({c_plus, c_minus}, eig).band_index;
      },
      py::arg("c_plus"), py::arg("c_minus"), py::arg("eig"));

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("t", &TrajectorySample::t)
      .def_readonly("point", &TrajectorySample::point)
      .def_property_readonly("state", [](const TrajectorySample& s) { return spinor_pair(s.state.amp); })
      .def_property_readonly("log_norm", [](const TrajectorySample& s) { return s.state.log_norm; })
      .def_readonly("coeffs", &TrajectorySample::coeffs)
      .def_readonly("expected_energy", &TrajectorySample::expected_energy)
      .def_readonly("band_index", &TrajectorySample::band_index)
      .def_readonly("spin", &TrajectorySample::spin)
      .def_readonly("e_plus", &TrajectorySample::e_plus)
      .def_readonly("e_minus", &TrajectorySample::e_minus)
      .def_readonly("valid", &TrajectorySample::valid);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("samples", &Trajectory::samples)
      .def_readonly("step_size", &Trajectory::step_size)
      .def_property_readonly("final_band_index", &Trajectory::final_band_index)
      .def_property_readonly("t", [](const Trajectory& tr) {
        std::vector<double> v;
        for (const auto& s : tr.samples) v.push_back(s.t);
        return v;
      })
      .def_property_readonly("band_index", [](const Trajectory& tr) {
        std::vector<double> v;
        for (const auto& s : tr.samples) v.push_back(s.band_index);
        return v;
      })
      .def("__len__", [](const Trajectory& tr) { return tr.samples.size(); });

  m.def(
      "evolve",
      [](const Path& path, const py::object& initial, const Model& model, double dt, int stride,
         bool renormalize) {
        const InitialState init = to_initial(initial);
        py::gil_scoped_release release;
        return evolve(path, init, model, {dt, stride, renormalize});
      },
      py::arg("path"), py::arg("initial") = "lower", py::arg("model") = Model{}, py::arg("dt") = 1e-3,
      py::arg("stride") = 10, py::arg("renormalize") = true);

  py::class_<NatPrediction>(m, "NatPrediction")
      .def_readonly("radius", &NatPrediction::radius)
      .def_readonly("xi", &NatPrediction::xi)
      .def_readonly("n0", &NatPrediction::n0)
      .def_readonly("tau_root", &NatPrediction::tau_root)
      .def_readonly("t_occur", &NatPrediction::t_occur);

  m.def(
      "predict_nat_radius",
      [](ControlPoint origin, double speed, Complex b0, const Model& model) {
        return predict_nat_radius(origin, b0, speed, model);
      },
      py::arg("origin"), py::arg("speed"), py::arg("b0") = Complex{-1.0, 0.0}, py::arg("model") = Model{});
  m.def(
      "adiabatic_b_exact",
      [](Complex b0, Complex delta_e0, Complex vartheta, double t) {
        return adiabatic_b_exact({b0, delta_e0, vartheta, std::abs(vartheta)}, t);
      },
      py::arg("b0"), py::arg("delta_e0"), py::arg("vartheta"), py::arg("t"));
  m.def(
      "adiabatic_b_approx",
      [](Complex b0, Complex delta_e0, double speed, double t) {
        return adiabatic_b_approx({b0, delta_e0, Complex{0.0, -speed}, speed}, t);
      },
      py::arg("b0"), py::arg("delta_e0"), py::arg("speed"), py::arg("t"));

  py::class_<FrontPoint>(m, "FrontPoint")
      .def_readonly("angle", &FrontPoint::angle)
      .def_readonly("measured_radius", &FrontPoint::measured_radius);
  py::class_<RaySamples>(m, "RaySamples")
      .def_readonly("angle", &RaySamples::angle)
      .def_readonly("arc_length", &RaySamples::arc_length)
      .def_readonly("points", &RaySamples::points)
      .def_readonly("band_index", &RaySamples::band_index);
  py::class_<PointSourceField>(m, "PointSourceField")
      .def_readonly("origin", &PointSourceField::origin)
      .def_readonly("speed", &PointSourceField::speed)
      .def_readonly("rays", &PointSourceField::rays)
      .def_readonly("front", &PointSourceField::front)
      .def_readonly("prediction", &PointSourceField::prediction)
      .def("median_front", &PointSourceField::median_front);

  m.def(
      "point_source_diagram",
      [](ControlPoint origin, double speed, const py::object& initial, int n_rays, double max_arc,
         double dt, int workers, const Model& model) {
        const InitialState init = to_initial(initial);
        PointSourceOptions opt;
        opt.n_rays = n_rays;
        opt.max_arc = max_arc;
        opt.step.dt = dt;
        opt.workers = workers;
        py::gil_scoped_release release;
        return point_source_diagram(origin, init, speed, opt, model);
      },
      py::arg("origin"), py::arg("speed"), py::arg("initial") = "lower", py::arg("n_rays") = 360,
      py::arg("max_arc") = 2.0, py::arg("dt") = 1e-3, py::arg("workers") = 1, py::arg("model") = Model{});

  m.def(
      "speed_sweep",
      [](const std::string& kind, const std::vector<double>& speeds, const std::string& direction,
         const ProtocolParams& params, const py::object& initial, double dt, int workers) {
        const InitialState init = to_initial(initial);
        const ProtocolSpec spec{parse_protocol_kind(kind), params, parse_direction(direction)};
        py::gil_scoped_release release;
        std::vector<std::pair<double, double>> out;
        for (const auto& p : speed_sweep(spec, speeds, init, {dt, 0, true}, {}, workers))
          out.emplace_back(p.speed, p.band_index_final);
        return out;
      },
      py::arg("kind"), py::arg("speeds"), py::arg("direction") = "ccw", py::arg("params") = ProtocolParams{},
      py::arg("initial") = "lower", py::arg("dt") = 1e-3, py::arg("workers") = 1,
      "List of (speed, final band index).");
  m.def("log_spaced_speeds", &log_spaced_speeds, py::arg("ln_min"), py::arg("ln_max"), py::arg("count"));

  py::class_<BoundaryPoint>(m, "BoundaryPoint")
      .def_readonly("x_m", &BoundaryPoint::x_m)
      .def_readonly("h_star", &BoundaryPoint::h_star);
  py::class_<PhaseDiagram>(m, "PhaseDiagram")
      .def_readonly("xm_grid", &PhaseDiagram::xm_grid)
      .def_readonly("h_grid", &PhaseDiagram::h_grid)
      .def_readonly("band_index_final", &PhaseDiagram::band_index_final)
      .def_readonly("boundary", &PhaseDiagram::boundary)
      .def_readonly("boundary_omitted", &PhaseDiagram::boundary_omitted)
      .def_readonly("speed", &PhaseDiagram::speed)
      .def("measured_boundary", &PhaseDiagram::measured_boundary, py::arg("i"), py::arg("hysteresis") = 0.02);

  m.def(
      "protocol_phase_diagram",
      [](const std::vector<double>& xm, const std::vector<double>& h, double speed, const std::string& direction,
         double dt, int workers) {
        const Direction dir = parse_direction(direction);
        py::gil_scoped_release release;
        return protocol_phase_diagram(xm, h, speed, dir, {dt, 0, true}, {}, workers);
      },
      py::arg("xm_grid"), py::arg("h_grid"), py::arg("speed"), py::arg("direction") = "ccw",
      py::arg("dt") = 1e-3, py::arg("workers") = 1);
  m.def("predicted_min_height", &predicted_min_height, py::arg("x_m"), py::arg("speed"), py::arg("h_lo"),
        py::arg("h_hi"), py::arg("model") = Model{}, py::arg("tol") = 1e-3);

  m.def(
      "run_experiment",
      [](const std::string& experiment, const std::string& config_json, const std::string& out_dir) {
        const auto e = parse_experiment(experiment);
        if (!e) throw ConfigError("<python>", 0, "unknown experiment '" + experiment + "'");
        CliOverrides o;
        if (!out_dir.empty()) o.out = out_dir;
        const auto cfg = parse_config(config_json, "<python>", e, o);
        std::string manifest;
        {
          py::gil_scoped_release release;
          manifest = run(cfg).to_json().dump();
        }
        return py::module_::import("json").attr("loads")(manifest);
      },
      py::arg("experiment"), py::arg("config_json") = "{}", py::arg("out_dir") = "",
      "Runs one experiment like the CLI and returns the manifest as a dict.");
}
