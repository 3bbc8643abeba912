#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "matukuma/classify.hpp"
#include "matukuma/pohozaev.hpp"
#include "matukuma/scan.hpp"
#include "matukuma/serialize.hpp"

namespace py = pybind11;
using namespace matukuma;
using io::json;

namespace {

ProblemSpec problem(const std::string& text) { return io::problem_from_json(io::parse(text)); }

Tolerances tolerances(const std::string& text) {
  return text.empty() ? Tolerances{} : io::tolerances_from_json(io::parse(text));
}

std::string shoot_json(const std::string& spec, double alpha, const std::string& tol) {
  const Shot s = shoot(problem(spec), alpha, tolerances(tol));
  json out{{"alpha", alpha},
           {"classification", io::to_json(s.classification)},
           {"events", io::events_json(s.trajectory)},
           {"companion_divergence", s.companion_divergence}};
  return io::dump(out, -1);
}

/// Samples of the trajectory as parallel arrays plus its events.
std::string trajectory_json(const std::string& spec, double alpha, double horizon, const std::string& tol) {
  const Trajectory tr = integrate(problem(spec), alpha, tolerances(tol), horizon);
  json cols{{"r", json::array()}, {"u", json::array()}, {"du", json::array()}, {"w", json::array()}, {"dw", json::array()}};
  for (const Sample& s : tr.samples()) {
    cols["r"].push_back(s.r);
    cols["u"].push_back(s.u);
    cols["du"].push_back(s.du);
    cols["w"].push_back(s.w);
    cols["dw"].push_back(s.dw);
  }
  return io::dump(json{{"samples", cols}, {"events", io::events_json(tr)}}, -1);
}

std::string pohozaev_json(const std::string& spec, double alpha, const std::vector<double>& radii, double horizon,
                          const std::string& tol) {
  const Tolerances t = tolerances(tol);
  const Trajectory tr = integrate(problem(spec), alpha, t, horizon);
  json reports = json::array();
  for (double R : radii) {
    reports.push_back(io::to_json(identity_3_3(tr, R, t.quad_rel)));
    reports.push_back(io::to_json(identity_4_1(tr, R, t.quad_rel)));
  }
  return io::dump(reports, -1);
}

std::string sweep_json(const std::string& spec, const std::vector<double>& alphas, const std::string& tol, int jobs) {
  SweepOptions opts;
  opts.jobs = jobs;
  return io::dump(io::to_json(sweep(problem(spec), alphas, tolerances(tol), opts)), -1);
}

std::string theorem5_json(const std::string& bump, const std::string& spec, double epsilon, double alpha_star,
                          double r_star, double delta, const std::string& tol, int jobs) {
  Theorem5Config cfg;
  cfg.epsilon = epsilon;
  cfg.alpha_star = alpha_star;
  cfg.r_star = r_star;
  cfg.delta = delta;
  SweepOptions opts;
  opts.jobs = jobs;
  const Theorem5Report r =
      theorem5_pipeline(io::bump_from_json(io::parse(bump)), problem(spec), cfg, tolerances(tol), opts);
  return io::dump(io::to_json(r), -1);
}

std::string oracles_json(const std::string& tol) {
  json out = json::array();
  for (const OracleResult& r : run_oracles(tolerances(tol))) out.push_back(io::to_json(r));
  return io::dump(out, -1);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the matukuma package; JSON strings in and out.";

  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  static py::exception<ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
  static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetObject(config_error.ptr(), py::make_tuple(e.what(), e.code()).ptr());
    } catch (const ValidationError& e) {
      PyErr_SetObject(validation_error.ptr(), py::make_tuple(e.what(), e.clause()).ptr());
    } catch (const DomainError& e) {
      PyErr_SetString(domain_error.ptr(), e.what());
    } catch (const NumericError& e) {
      PyErr_SetString(numeric_error.ptr(), e.what());
    }
  });

  using release = py::call_guard<py::gil_scoped_release>;
  m.def("critical_exponent", &critical_exponent, py::arg("n"), py::arg("l"));
  m.def("gamma_star", &gamma_star, py::arg("n"), py::arg("l"), py::arg("sigma"));
  m.def("critical_profile", &critical_profile, py::arg("n"), py::arg("l"), py::arg("alpha"), py::arg("r"));
  m.def("example_iii_solution", &example_iii_solution, py::arg("n"), py::arg("l"), py::arg("p"), py::arg("r"));
  m.def(
      "phi_closed_form",
      [](const std::string& spec, double alpha, double r) { return phi_closed_form(problem(spec), alpha, r); },
      py::arg("spec"), py::arg("alpha"), py::arg("r"));
  m.def(
      "normalize_problem", [](const std::string& spec) { return io::dump(io::to_json(problem(spec)), -1); },
      py::arg("spec"));
  m.def(
      "weight_f",
      [](const std::string& spec, const std::vector<double>& r) {
        const ProblemSpec s = problem(spec);
        std::vector<double> out;
        for (double x : r) out.push_back(s.weight().f(x));
        return out;
      },
      py::arg("spec"), py::arg("r"));
  m.def(
      "hypotheses",
      [](const std::string& spec) {
        const ProblemSpec s = problem(spec);
        return io::dump(io::to_json(check_hypotheses(s.weight(), s)), -1);
      },
      py::arg("spec"), release());
  m.def("shoot", &shoot_json, py::arg("spec"), py::arg("alpha"), py::arg("tol"), release());
  m.def("trajectory", &trajectory_json, py::arg("spec"), py::arg("alpha"), py::arg("horizon"), py::arg("tol"),
        release());
  m.def("pohozaev", &pohozaev_json, py::arg("spec"), py::arg("alpha"), py::arg("radii"), py::arg("horizon"),
        py::arg("tol"), release());
  m.def("sweep", &sweep_json, py::arg("spec"), py::arg("alphas"), py::arg("tol"), py::arg("jobs"), release());
  m.def("theorem5", &theorem5_json, py::arg("bump"), py::arg("spec"), py::arg("epsilon"), py::arg("alpha_star"),
        py::arg("r_star"), py::arg("delta"), py::arg("tol"), py::arg("jobs"), release());
  m.def(
      "small_alpha",
      [](const std::string& spec, const std::string& tol) {
        return io::dump(io::to_json(theorem1_2_smallalpha_check(problem(spec), tolerances(tol))), -1);
      },
      py::arg("spec"), py::arg("tol"), release());
  m.def("oracles", &oracles_json, py::arg("tol"), release());
}
