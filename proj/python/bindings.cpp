#include <algorithm>
#include <span>
#include <sstream>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcns/errors.hpp"
#include "fcns/experiments.hpp"
#include "fcns/scenarios.hpp"

namespace py = pybind11;
using namespace fcns;

namespace {

py::array_t<double> to_array(std::span<const double> v)
{
   py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
   std::copy(v.begin(), v.end(), a.mutable_data());
   return a;
}

py::array_t<double> to_array(const GridFunction& f) { return to_array(f.values()); }

py::array_t<double> to_array(const std::vector<double>& v)
{
   return to_array(std::span<const double>(v));
}

py::dict zone_dict(const ZoneReport& z)
{
   py::dict d;
   d["epsilon"] = z.epsilon;
   d["gamma"] = z.gamma;
   d["x_min"] = z.x_min;
   d["sup_err_free"] = z.sup_err_free;
   d["x_star"] = z.x_star;
   d["transition_err"] = z.transition_err;
   d["degenerate"] = z.degenerate;
   return d;
}

py::dict hypothesis_dict(const HypothesisReport& r)
{
   py::dict d;
   d["h1_ok"] = r.h1_ok;
   d["h2_ok"] = r.h2_ok;
   d["h3_ok"] = r.h3_ok;
   d["h4_ok"] = r.h4_ok;
   d["h3_residual"] = r.h3_residual;
   d["dv0"] = r.dv0;
   d["du0"] = r.du0;
   d["min_v_interior"] = r.min_v_interior;
   return d;
}

Scenario scenario_arg(const std::string& name)
{
   try {
      return scenario_from_string(name);
   } catch (const std::exception& e) {
      throw ConfigError(e.what());
   }
}

} // namespace

PYBIND11_MODULE(_core, m)
{
   m.doc() = "Soft-congestion Navier-Stokes fronts: profiles, solvers and scenario runner";
   m.attr("__version__") = FCNS_VERSION;

   py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
   py::register_exception<InvalidEndStates>(m, "InvalidEndStates", PyExc_ValueError);
   py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
   // Translators run newest first, so the subclass is registered last.
   const auto solver_error =
      py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
   py::register_exception<ConstraintViolation>(m, "ConstraintViolation", solver_error.ptr());

   py::class_<PressureLaw>(m, "PressureLaw")
      .def(py::init<double, double>(), py::arg("epsilon"), py::arg("gamma") = 1.0)
      .def_readonly("epsilon", &PressureLaw::epsilon)
      .def_readonly("gamma", &PressureLaw::gamma)
      .def("__call__", &PressureLaw::operator(), py::arg("v"))
      .def("derivatives", &PressureLaw::derivatives, py::arg("v"))
      .def("v_minus", &PressureLaw::v_minus)
      .def("weight_ratio", &PressureLaw::weight_ratio, py::arg("v"));
   m.def("p_eval", &p_eval, py::arg("law"), py::arg("v"));

   py::class_<EndStates>(m, "EndStates")
      .def(py::init([](double vp, double um, double up, double mu) {
              EndStates es{vp, um, up, mu};
              es.validate();
              return es;
           }),
           py::arg("v_plus") = 2.0, py::arg("u_minus") = 1.0, py::arg("u_plus") = 0.0,
           py::arg("mu") = 1.0)
      .def_readonly("v_plus", &EndStates::v_plus)
      .def_readonly("u_minus", &EndStates::u_minus)
      .def_readonly("u_plus", &EndStates::u_plus)
      .def_readonly("mu", &EndStates::mu);

   py::class_<LimitProfile>(m, "LimitProfile")
      .def(py::init<const EndStates&>(), py::arg("end_states"))
      .def(py::init<const EndStates&, double>(), py::arg("end_states"), py::arg("speed"))
      .def_property_readonly("speed", &LimitProfile::speed)
      .def_property_readonly("p_minus", &LimitProfile::p_minus)
      .def("v", py::vectorize(&LimitProfile::v))
      .def("u", py::vectorize(&LimitProfile::u))
      .def("w", py::vectorize(&LimitProfile::w))
      .def("p", py::vectorize(&LimitProfile::p))
      .def("dv", py::vectorize(&LimitProfile::dv));

   m.def("eps_speed", &eps_speed, py::arg("law"), py::arg("end_states"));
   m.def("eps_speed_printed", &eps_speed_printed, py::arg("law"), py::arg("end_states"));

   py::class_<EpsProfile>(m, "EpsProfile")
      .def_property_readonly("speed", &EpsProfile::speed)
      .def_property_readonly("v_minus", &EpsProfile::v_minus)
      .def_property_readonly("v_plus", &EpsProfile::v_plus)
      .def_property_readonly("u_plus", &EpsProfile::u_plus)
      .def_property_readonly("v_at_origin", &EpsProfile::v_at_origin)
      .def_property_readonly("x", [](const EpsProfile& p) { return to_array(p.grid().nodes()); })
      .def_property_readonly("v_samples", [](const EpsProfile& p) { return to_array(p.v_samples()); })
      .def_property_readonly("u_samples", [](const EpsProfile& p) { return to_array(p.u_samples()); })
      .def_property_readonly("w_samples", [](const EpsProfile& p) { return to_array(p.w_samples()); })
      .def_property_readonly("theta_samples",
                             [](const EpsProfile& p) { return to_array(p.theta_samples()); })
      .def("v", &EpsProfile::v, py::arg("x"))
      .def("v_interp", py::vectorize(&EpsProfile::v_interp), py::arg("x"))
      .def("ode_residual", &EpsProfile::ode_residual);
   m.def(
      "eps_profile",
      [](const PressureLaw& law, const EndStates& es, std::size_t n, double tol) {
         return build_eps_profile(law, es, n, tol);
      },
      py::arg("law"), py::arg("end_states"), py::arg("n") = 8001, py::arg("tol") = 1e-12);

   m.def(
      "three_zone",
      [](const EpsProfile& p, double K, double C0) {
         const EndStates& es = p.end_states();
         ZoneParams zp;
         zp.K = K;
         zp.C0 = C0;
         return zone_dict(
            three_zone_diagnostics(p, LimitProfile(es, 1.0 / std::sqrt(es.v_plus - 1.0)), zp));
      },
      py::arg("profile"), py::arg("K") = 2.0, py::arg("C0") = 10.0);
   m.def("fit_loglog_slope", &fit_loglog_slope, py::arg("x"), py::arg("y"));

   m.def(
      "stability",
      [](const EpsProfile& p, double T, double h) {
         StabilityParams prm;
         prm.T = T;
         prm.h = h;
         const StabilityResult r = stability_experiment(p, prm);
         py::dict d;
         d["pass"] = r.pass();
         d["amplitude"] = r.amplitude;
         d["decay"] = r.decay;
         d["x_norm_ratio"] = r.x_norm_ratio;
         d["min_v"] = r.min_v;
         d["steps"] = r.steps;
         std::vector<double> t, dev;
         for (const auto& rec : r.records) {
            t.push_back(rec.t);
            dev.push_back(rec.sup_dev_v);
         }
         d["t"] = to_array(t);
         d["sup_dev_v"] = to_array(dev);
         return d;
      },
      py::arg("profile"), py::arg("T") = 3.0, py::arg("h") = 0.02);

   m.def(
      "validate_hypotheses",
      [](const EndStates& es, double X, std::size_t n) {
         return hypothesis_dict(validate_hypotheses(traveling_wave_data(es, X, n)));
      },
      py::arg("end_states"), py::arg("X") = 12.0, py::arg("n") = 1201);

   m.def(
      "free_boundary_oracle",
      [](const EndStates& es, double X, double h, double dt, double T) {
         FBConfig cfg;
         cfg.T = T;
         const auto lv = fb_oracle_study(es, X, h, dt, 1, cfg);
         const FBOracleLevel& L = lv.front();
         py::dict d;
         d["status"] = to_string(L.status);
         d["iterations"] = L.iterations;
         d["T"] = L.T;
         d["x_err"] = L.x_err;
         d["p_err"] = L.p_err;
         d["min_v_interior"] = L.min_v_interior;
         d["max_transport"] = L.identities.max_transport;
         d["max_edo1"] = L.identities.max_edo1;
         d["max_edo2"] = L.identities.max_edo2;
         d["max_bcw"] = L.identities.max_bcw;
         return d;
      },
      py::arg("end_states"), py::arg("X") = 12.0, py::arg("h") = 0.01, py::arg("dt") = 1e-3,
      py::arg("T") = 0.5);

   m.def(
      "scenarios", []() {
         std::vector<std::string> names;
         for (Scenario s : all_scenarios())
            names.push_back(to_string(s));
         return names;
      });
   m.def(
      "_resolve",
      [](const std::string& name, const std::string& values_json, const std::string& out) {
         const RunConfig cfg = resolve_config(scenario_arg(name), nlohmann::json::object(),
                                              nlohmann::json::parse(values_json), out);
         return cfg.to_json().dump();
      },
      py::arg("scenario"), py::arg("values_json"), py::arg("out") = "");
   m.def(
      "_run",
      [](const std::string& name, const std::string& values_json, const std::string& out) {
         const RunConfig cfg = resolve_config(scenario_arg(name), nlohmann::json::object(),
                                              nlohmann::json::parse(values_json), out);
         std::ostringstream log;
         int code = 0;
         {
            py::gil_scoped_release release;
            code = run(cfg, log);
         }
         return py::make_tuple(code, log.str());
      },
      py::arg("scenario"), py::arg("values_json"), py::arg("out"));
}
