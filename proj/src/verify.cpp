#include "muxrep/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "muxrep/analytics.hpp"
#include "muxrep/dlcz.hpp"
#include "muxrep/oracle.hpp"
#include "muxrep/presets.hpp"
#include "muxrep/simulator.hpp"

namespace muxrep::verify {

namespace {

const std::vector<double> kP0{0.05, 0.2, 0.5};
const std::vector<double> kP1{0.3, 1.0};
const std::vector<std::int64_t> kTau{0, 1, 2, 5, 10};

std::string point(double p0, double p1, std::int64_t tau) {
  return "p0=" + std::to_string(p0) + " p1=" + std::to_string(p1) + " tau=" + std::to_string(tau);
}

CheckResult relative(std::string suite, std::string name, double observed, double expected, double tol) {
  CheckResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.observed = observed;
  r.expected = expected;
  r.tolerance = tol;
  const double scale = std::max(std::abs(expected), 1e-300);
  r.passed = std::isfinite(observed) && std::abs(observed - expected) <= tol * scale;
  return r;
}

double perturbed(double p1, const Options& o) { return std::min(1.0, p1 * (1.0 + o.perturb_p1)); }

std::vector<CheckResult> identity_suite(const Options& o) {
  std::vector<CheckResult> out;
  for (double p0 : kP0) {
    for (double p1 : kP1) {
      for (auto tau : kTau) {
        const TimeUnits t(tau);
        const double z = analytics::mean_Z_finite(p0, t);
        const double T = analytics::mean_time_finite(p0, p1, t);
        out.push_back(relative("identity", "T=(Z+1)/p1 " + point(p0, p1, tau), T, (z + 1.0) / perturbed(p1, o), 1e-12));
        const auto mux = analytics::multiplexed_rate(p0, perturbed(p1, o), t, 1);
        out.push_back(relative("identity", "rate(n=1)*T=1 " + point(p0, p1, tau), mux.rate * T, 1.0, 1e-12));
        out.push_back(relative("identity", "alpha(n=1)=1 " + point(p0, p1, tau), mux.alpha, 1.0, 0.0));
      }
      const double big = analytics::mean_time_finite(p0, perturbed(p1, o), TimeUnits(100000));
      out.push_back(relative("identity", "T(tau large)=T_inf " + point(p0, p1, 100000), big,
                             analytics::mean_time_infinite(p0, p1), 1e-9));
    }
  }
  return out;
}

std::vector<CheckResult> oracle_suite(const Options& o) {
  std::vector<CheckResult> out;
  for (double p0 : kP0) {
    for (double p1 : kP1) {
      for (auto tau : kTau) {
        const TimeUnits t(tau);
        const double exact = oracle::exact_mean_time_doubling(p0, p1, t);
        out.push_back(relative("oracle", "T closed form vs chain " + point(p0, p1, tau),
                               analytics::mean_time_finite(p0, perturbed(p1, o), t), exact, 1e-9));
        if (tau <= 5) {
          const double rate = oracle::exact_rate_multiplexed(p0, p1, t, 1);
          out.push_back(relative("oracle", "n=1 steady rate vs 1/T " + point(p0, p1, tau),
                                 analytics::multiplexed_rate(p0, perturbed(p1, o), t, 1).rate, rate, 1e-9));
        }
      }
    }
  }
  return out;
}

std::vector<CheckResult> dlcz_suite(const Options&) {
  std::vector<CheckResult> out;
  auto phys = presets::long_link();
  const auto d = dlcz::derive(phys);
  const double tol = 5e-4;
  out.push_back(relative("dlcz", "NPRD p0", d.p0, 0.001, 0.05));
  const std::vector<double> p_nprd{0.6975, 0.496358, 0.310787};
  const std::vector<double> c_nprd{0.55, 1.65, 3.85};
  for (std::size_t i = 0; i < 3; ++i) {
    out.push_back(relative("dlcz", "NPRD P_" + std::to_string(i + 1), d.p_conn[i], p_nprd[i], tol));
    out.push_back(relative("dlcz", "NPRD c_" + std::to_string(i + 1), d.c[i + 1], c_nprd[i], tol));
  }
  out.push_back(relative("dlcz", "NPRD epsilon", d.epsilon.value_or(NAN), 0.206186, tol));
  phys.detector = dlcz::Detector::PNRD;
  const auto e = dlcz::derive(phys);
  const std::vector<double> p_pnrd{0.495, 0.483471, 0.452663};
  const std::vector<double> c_pnrd{0.1, 0.3, 0.7};
  for (std::size_t i = 0; i < 3; ++i) {
    out.push_back(relative("dlcz", "PNRD P_" + std::to_string(i + 1), e.p_conn[i], p_pnrd[i], tol));
    out.push_back(relative("dlcz", "PNRD c_" + std::to_string(i + 1), e.c[i + 1], c_pnrd[i], tol));
  }
  out.push_back(relative("dlcz", "fidelity bound", d.fidelity_bound, 7.92, 1e-12));
  return out;
}

std::vector<CheckResult> limits_suite(const Options& o) {
  std::vector<CheckResult> out;
  {
    bool monotone = true;
    double prev = INFINITY;
    double worst = 0.0;
    for (std::int64_t tau = 0; tau <= 2000; tau += (tau < 50 ? 1 : 25)) {
      const double T = analytics::mean_time_finite(0.01, perturbed(0.5, o), TimeUnits(tau));
      if (T > prev * (1 + 1e-12)) {
        monotone = false;
        worst = std::max(worst, T / prev - 1);
      }
      prev = T;
    }
    CheckResult r{"limits", "T non-increasing in tau (p0=0.01 p1=0.5)", monotone, worst, 0.0, 1e-12, ""};
    out.push_back(r);
  }
  for (double p0 : {0.001, 0.002}) {
    for (std::int64_t tau : {0, 1, 5, 10, 20}) {
      const TimeUnits t(tau);
      out.push_back(relative("limits", "asymptotic Z p0=" + std::to_string(p0) + " tau=" + std::to_string(tau),
                             analytics::mean_Z_asymptotic(p0, t), analytics::mean_Z_finite(p0, t), 0.05));
    }
  }
  out.push_back(relative("limits", "T(tau=0) = (1/p0^2 + 1)/p1",
                         analytics::mean_time_finite(0.01, perturbed(0.5, o), TimeUnits(0)), 20002.0, 1e-9));
  {
    const auto m = analytics::multiplexed_rate(0.1, 0.5, TimeUnits(200), 50);
    CheckResult r{"limits", "alpha small for large n (p0=0.1 n=50 tau=200)", m.alpha < 0.05, m.alpha, 0.0, 0.05, ""};
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> simulation_suite(const Options& o) {
  std::vector<CheckResult> out;
  const double expected = analytics::mean_time_finite(0.2, perturbed(1.0, o), TimeUnits(1));
  for (auto arch : {Architecture::Parallel, Architecture::Multiplexed}) {
    const auto params = doubling_params(0.2, 1.0, 1, 1, arch);
    const auto est = sim::estimate_rate(params, o.seed, sim::TrialBudget{20000});
    CheckResult r;
    r.suite = "simulation";
    r.name = std::string("mean time N=1 n=1 p0=0.2 p1=1 tau=1 ") + std::string(to_string(arch));
    r.observed = est.mean_time;
    r.expected = expected;
    r.tolerance = 4.0 * est.mean_time_std_error;
    r.passed = std::abs(r.observed - r.expected) <= r.tolerance;
    r.detail = "tolerance is 4 standard errors";
    out.push_back(r);
  }
  {
    const auto params = doubling_params(0.2, 0.5, 2, 2, Architecture::Multiplexed);
    auto p = params;
    p.concurrent_generation = false;
    const double exact = oracle::exact_rate_multiplexed(0.2, perturbed(0.5, o), TimeUnits(2), 2, false);
    const auto est = sim::estimate_rate(p, o.seed, sim::HorizonBudget{400000, 20});
    CheckResult r{"simulation", "steady rate N=1 n=2 p0=0.2 p1=0.5 tau=2 multiplexed", false, est.mean_rate, exact,
                  4.0 * est.std_error, "tolerance is 4 standard errors"};
    r.passed = std::abs(r.observed - r.expected) <= r.tolerance;
    out.push_back(r);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identity", "oracle", "dlcz", "limits", "simulation"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& suite, const Options& options) {
  if (suite == "identity") return identity_suite(options);
  if (suite == "oracle") return oracle_suite(options);
  if (suite == "dlcz") return dlcz_suite(options);
  if (suite == "limits") return limits_suite(options);
  if (suite == "simulation") return simulation_suite(options);
  throw std::invalid_argument("unknown verification suite: " + suite);
}

std::vector<CheckResult> run_all(const Options& options) {
  std::vector<CheckResult> all;
  for (const auto& s : suite_names()) {
    auto part = run_suite(s, options);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

nlohmann::json to_json(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    checks.push_back({{"suite", r.suite},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"observed", r.observed},
                      {"expected", r.expected},
                      {"tolerance", r.tolerance},
                      {"detail", r.detail}});
  }
  return {{"passed", failed == 0}, {"total", results.size()}, {"failed", failed}, {"checks", checks}};
}

}  // namespace muxrep::verify
