#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "muxrep/analytics.hpp"
#include "muxrep/dlcz.hpp"
#include "muxrep/oracle.hpp"
#include "muxrep/simulator.hpp"
#include "muxrep/verify.hpp"

namespace py = pybind11;
using namespace muxrep;

namespace {

py::dict estimate_dict(const sim::RateEstimate& e) {
  py::dict d;
  d["rate"] = e.mean_rate;
  d["std_error"] = e.std_error;
  d["method"] = std::string(sim::to_string(e.method));
  d["budget"] = e.trials_or_horizon;
  d["successes"] = e.successes;
  d["mean_time"] = e.successes ? py::object(py::float_(e.mean_time)) : py::none();
  d["mean_time_std_error"] = e.mean_time_std_error;
  d["projected_rate"] = e.projected_rate ? py::object(py::float_(*e.projected_rate)) : py::none();
  d["generation_rounds"] = e.generation_rounds;
  d["truncated"] = e.truncated;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed forms, exact chains and Monte Carlo for parallel and multiplexed repeaters.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DivergentError>(m, "DivergentError", PyExc_ArithmeticError);
  py::register_exception<oracle::OracleTooLarge>(m, "OracleTooLarge", PyExc_RuntimeError);

  py::enum_<Architecture>(m, "Architecture")
      .value("Parallel", Architecture::Parallel)
      .value("Multiplexed", Architecture::Multiplexed);

  py::class_<RepeaterParams>(m, "RepeaterParams")
      .def(py::init<>())
      .def_readwrite("levels", &RepeaterParams::levels)
      .def_readwrite("elements", &RepeaterParams::elements)
      .def_property(
          "tau", [](const RepeaterParams& p) { return p.tau.value(); },
          [](RepeaterParams& p, std::int64_t t) { p.tau = TimeUnits(t); })
      .def_readwrite("p_gen", &RepeaterParams::p_gen)
      .def_readwrite("p_conn", &RepeaterParams::p_conn)
      .def_readwrite("level_latency", &RepeaterParams::level_latency)
      .def_readwrite("architecture", &RepeaterParams::architecture)
      .def_readwrite("final_projection", &RepeaterParams::final_projection)
      .def_readwrite("concurrent_generation", &RepeaterParams::concurrent_generation)
      .def("validate", [](const RepeaterParams& p) { validate(p); })
      .def("__eq__", [](const RepeaterParams& a, const RepeaterParams& b) { return a == b; });

  m.def("doubling_params", &doubling_params, py::arg("p0"), py::arg("p1"), py::arg("tau"), py::arg("n") = 1,
        py::arg("architecture") = Architecture::Parallel);

  m.def(
      "mean_time_infinite", [](double p0, double p1) { return analytics::mean_time_infinite(p0, p1); },
      py::arg("p0"), py::arg("p1"));
  m.def(
      "mean_time_finite",
      [](double p0, double p1, std::int64_t tau) { return analytics::mean_time_finite(p0, p1, TimeUnits(tau)); },
      py::arg("p0"), py::arg("p1"), py::arg("tau"));
  m.def(
      "mean_Z_terms",
      [](double p0, std::int64_t tau) {
        const auto t = analytics::mean_Z_terms(p0, TimeUnits(tau));
        py::dict d;
        d["waiting"] = t.waiting;
        d["fruitless"] = t.fruitless;
        d["second"] = t.second;
        d["total"] = t.total();
        return d;
      },
      py::arg("p0"), py::arg("tau"));
  m.def(
      "mean_Z_asymptotic",
      [](double p0, std::int64_t tau) { return analytics::mean_Z_asymptotic(p0, TimeUnits(tau)); }, py::arg("p0"),
      py::arg("tau"));
  m.def(
      "multiplexed_rate",
      [](double p0, double p1, std::int64_t tau, int n) {
        const auto r = analytics::multiplexed_rate(p0, p1, TimeUnits(tau), n);
        return py::make_tuple(r.rate, r.alpha);
      },
      py::arg("p0"), py::arg("p1"), py::arg("tau"), py::arg("n"), "Returns (rate, alpha).");

  m.def(
      "exact_mean_time_doubling",
      [](double p0, double p1, std::int64_t tau) { return oracle::exact_mean_time_doubling(p0, p1, TimeUnits(tau)); },
      py::arg("p0"), py::arg("p1"), py::arg("tau"));
  m.def(
      "exact_rate_multiplexed",
      [](double p0, double p1, std::int64_t tau, int n, bool concurrent) {
        return oracle::exact_rate_multiplexed(p0, p1, TimeUnits(tau), n, concurrent);
      },
      py::arg("p0"), py::arg("p1"), py::arg("tau"), py::arg("n"), py::arg("concurrent_generation") = false);

  m.def(
      "dlcz_derive",
      [](double length_km, int levels, double loss_db_per_km, double eta0, double eta, const std::string& detector,
         double refractive_index) {
        dlcz::PhysicalParams p;
        p.total_length_km = length_km;
        p.levels = levels;
        p.fiber_loss_db_per_km = loss_db_per_km;
        p.eta0 = eta0;
        p.eta = eta;
        p.detector = dlcz::parse_detector(detector);
        p.refractive_index = refractive_index;
        const auto d = dlcz::derive(p);
        py::dict out;
        out["p0"] = d.p0;
        out["p_conn"] = d.p_conn;
        out["c"] = d.c;
        out["epsilon"] = d.epsilon ? py::object(py::float_(*d.epsilon)) : py::none();
        out["fidelity_bound"] = d.fidelity_bound;
        out["time_unit_ms"] = d.time_unit_ms;
        out["segment_length_km"] = d.segment_length_km;
        return out;
      },
      py::arg("length_km") = 1000.0, py::arg("levels") = 3, py::arg("loss_db_per_km") = 0.16,
      py::arg("eta0") = 0.01, py::arg("eta") = 0.9, py::arg("detector") = "NPRD", py::arg("refractive_index") = 1.5);
  m.def(
      "lifetime_to_units",
      [](double tau_ms, double time_unit_ms) {
        dlcz::DerivedProbabilities d;
        d.time_unit_ms = time_unit_ms;
        return dlcz::lifetime_to_units(tau_ms, d).value();
      },
      py::arg("tau_ms"), py::arg("time_unit_ms"));

  m.def(
      "run_trial",
      [](const RepeaterParams& params, std::uint64_t seed, std::int64_t max_time) {
        sim::TrialLimits limits;
        limits.max_time = max_time;
        sim::TrialResult r;
        {
          py::gil_scoped_release release;
          r = sim::run_trial(params, seed, limits);
        }
        py::dict d;
        d["time_to_success"] = r.time_to_success.value();
        d["attempts_by_level"] = r.attempts_by_level;
        d["expiries"] = r.expiries;
        d["final_projection_passed"] =
            r.final_projection_passed ? py::object(py::bool_(*r.final_projection_passed)) : py::none();
        d["truncated"] = r.truncated;
        return d;
      },
      py::arg("params"), py::arg("seed"), py::arg("max_time") = sim::TrialLimits{}.max_time);
  m.def(
      "estimate_rate",
      [](const RepeaterParams& params, std::uint64_t seed, std::optional<std::uint64_t> trials,
         std::optional<std::int64_t> horizon, int batches, int threads) {
        if (trials.has_value() == horizon.has_value()) {
          throw ValidationError("give exactly one of trials or horizon");
        }
        sim::Budget budget = trials ? sim::Budget(sim::TrialBudget{*trials})
                                    : sim::Budget(sim::HorizonBudget{*horizon, batches});
        sim::EstimateOptions options;
        options.threads = threads;
        sim::RateEstimate e;
        {
          py::gil_scoped_release release;
          e = sim::estimate_rate(params, seed, budget, options);
        }
        return estimate_dict(e);
      },
      py::arg("params"), py::arg("seed"), py::arg("trials") = py::none(), py::arg("horizon") = py::none(),
      py::arg("batches") = 30, py::arg("threads") = 1);

  m.def(
      "verify",
      [](const std::string& suite, double perturb_p1) {
        verify::Options o;
        o.perturb_p1 = perturb_p1;
        const auto results = suite.empty() ? verify::run_all(o) : verify::run_suite(suite, o);
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["suite"] = r.suite;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["observed"] = r.observed;
          d["expected"] = r.expected;
          d["tolerance"] = r.tolerance;
          out.append(d);
        }
        return out;
      },
      py::arg("suite") = "", py::arg("perturb_p1") = 0.0);
}
