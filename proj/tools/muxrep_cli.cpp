// muxrep: closed forms, DLCZ probabilities, simulation sweeps and self-checks.
//
//   muxrep analytic --p0 0.01 --p1 0.5 --tau 0,1,10,100
//   muxrep dlcz --detector NPRD --tau-ms 100
//   muxrep simulate --preset fig3 --seed 1 --out fig3.csv
//   muxrep verify --suite oracle --json
//
// Exit status: 0 success, 1 usage or input error, 2 verification failure.

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "muxrep/config.hpp"
#include "muxrep/dlcz.hpp"
#include "muxrep/oracle.hpp"
#include "muxrep/presets.hpp"
#include "muxrep/report.hpp"
#include "muxrep/sweep.hpp"
#include "muxrep/verify.hpp"

namespace {

using namespace muxrep;

constexpr int kUsageError = 1;
constexpr int kVerifyFailed = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T, class F>
std::vector<T> parse_list(const std::string& text, F parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<T>(parse(item)));
  if (out.empty()) throw UsageError("empty list: '" + text + "'");
  return out;
}

std::vector<double> doubles(const std::string& text) {
  return parse_list<double>(text, [](const std::string& s) { return parse_double(s); });
}
std::vector<std::int64_t> ints(const std::string& text) {
  return parse_list<std::int64_t>(text, [](const std::string& s) { return parse_int(s); });
}

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------- analytic

struct AnalyticArgs {
  std::string p0 = "0.01";
  std::string p1 = "0.5";
  std::string tau = "0,1,2,5,10,20,50,100,200,500,1000";
  std::string n = "1";
  std::string preset;
  bool terms = false;
  bool json = false;
  std::string out;
};

int run_analytic(const AnalyticArgs& a, const std::vector<std::string>& explicit_flags) {
  presets::AnalyticGrid grid;
  if (!a.preset.empty()) {
    if (a.preset == "fig2") {
      grid = presets::fig2();
    } else if (a.preset == "fig3") {
      grid = presets::fig3_analytic();
    } else {
      throw UsageError("unknown analytic preset: " + a.preset + " (expected fig2 or fig3)");
    }
  } else {
    grid = {doubles(a.p0), doubles(a.p1), ints(a.tau), {}};
    for (auto v : ints(a.n)) grid.ns.push_back(static_cast<int>(v));
  }
  auto has = [&](const std::string& f) {
    return std::find(explicit_flags.begin(), explicit_flags.end(), f) != explicit_flags.end();
  };
  if (!a.preset.empty()) {
    if (has("--p0")) grid.p0s = doubles(a.p0);
    if (has("--p1")) grid.p1s = doubles(a.p1);
    if (has("--tau")) grid.taus = ints(a.tau);
    if (has("--n")) {
      grid.ns.clear();
      for (auto v : ints(a.n)) grid.ns.push_back(static_cast<int>(v));
    }
  }
  for (double p : grid.p0s) Probability{p};
  for (double p : grid.p1s) Probability{p};
  for (auto t : grid.taus) TimeUnits{t};
  for (int n : grid.ns)
    if (n < 1) throw ValidationError("n must be positive");

  std::cerr << "# analytic grid\n"
            << "p0 = " << format_list(grid.p0s) << "\np1 = " << format_list(grid.p1s)
            << "\ntau = " << format_list(grid.taus) << "\nn = ";
  for (std::size_t i = 0; i < grid.ns.size(); ++i) std::cerr << (i ? ", " : "") << grid.ns[i];
  std::cerr << '\n';

  const auto rows = report::analytic_table(grid.p0s, grid.p1s, grid.taus, grid.ns);
  Output out(a.out);
  if (a.json) {
    for (const auto& r : rows) out.stream() << report::to_json(r, a.terms).dump() << '\n';
  } else {
    report::write_analytic_csv(out.stream(), rows, a.terms);
  }
  return 0;
}

// ---------------------------------------------------------------- dlcz

struct DlczArgs {
  std::optional<double> length_km;
  std::optional<int> levels;
  std::optional<double> loss;
  std::optional<double> eta0;
  std::optional<double> eta;
  std::optional<std::string> detector;
  std::optional<double> index;
  std::vector<double> tau_ms;
  std::string config;
  bool json = false;
  std::string out;
};

int run_dlcz(const DlczArgs& a) {
  dlcz::PhysicalParams phys = presets::long_link();
  if (!a.config.empty()) phys = read_physical_params(KeyValueConfig::load(a.config), phys);
  if (a.length_km) phys.total_length_km = *a.length_km;
  if (a.levels) phys.levels = *a.levels;
  if (a.loss) phys.fiber_loss_db_per_km = *a.loss;
  if (a.eta0) phys.eta0 = *a.eta0;
  if (a.eta) phys.eta = *a.eta;
  if (a.detector) phys.detector = dlcz::parse_detector(*a.detector);
  if (a.index) phys.refractive_index = *a.index;
  const auto derived = dlcz::derive(phys);

  KeyValueConfig resolved;
  write_physical_params(resolved, phys);
  std::cerr << "# resolved configuration\n" << resolved.serialize();

  Output out(a.out);
  if (a.json) {
    auto j = report::to_json(derived);
    if (!a.tau_ms.empty()) {
      auto& units = j["tau_units"] = nlohmann::json::object();
      for (double ms : a.tau_ms) units[format_double(ms)] = dlcz::lifetime_to_units(ms, derived).value();
    }
    out.stream() << j.dump(2) << '\n';
  } else {
    report::write_dlcz_csv(out.stream(), derived);
    for (double ms : a.tau_ms) {
      out.stream() << "tau_units@" << format_double(ms) << "ms," << dlcz::lifetime_to_units(ms, derived).value()
                   << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string preset;
  std::string config;
  std::optional<double> p0;
  std::optional<std::string> p1;
  std::optional<std::string> tau;
  std::optional<std::string> n;
  std::optional<int> levels;
  std::optional<std::string> architecture;
  std::optional<std::string> latency;
  std::optional<double> projection;
  bool no_concurrent = false;
  std::optional<std::uint64_t> trials;
  std::optional<std::int64_t> horizon;
  std::optional<int> batches;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<std::int64_t> max_time;
  bool json = false;
  std::string out;
};

void set_axis(SweepSpec& spec, const std::string& name, const std::vector<std::string>& values) {
  for (auto& axis : spec.axes) {
    if (axis.name == name) {
      axis.values = values;
      return;
    }
  }
  spec.axes.push_back({name, values});
}

void drop_axis(SweepSpec& spec, const std::string& name) {
  std::erase_if(spec.axes, [&](const SweepAxis& a) { return a.name == name; });
}

// A flag with one value overrides the base parameter; with a comma list it
// becomes a sweep axis.
void apply_list_flag(SweepSpec& spec, const std::string& axis, const std::string& text,
                     const std::function<void(const std::string&)>& set_base) {
  const auto values = split_list(text);
  if (values.empty()) throw UsageError("empty value for " + axis);
  if (values.size() == 1) {
    drop_axis(spec, axis);
    set_base(values.front());
  } else {
    set_axis(spec, axis, values);
  }
}

int run_simulate(const SimulateArgs& a) {
  SweepSpec spec;
  if (a.preset == "fig3") {
    spec = presets::fig3();
  } else if (a.preset == "fig4") {
    spec = presets::fig4();
  } else if (!a.preset.empty()) {
    throw UsageError("unknown simulate preset: " + a.preset + " (expected fig3 or fig4)");
  } else {
    spec.base = doubling_params(0.2, 1.0, 1);
  }
  if (!a.config.empty()) spec = read_sweep_spec(KeyValueConfig::load(a.config), spec);

  auto& b = spec.base;
  if (a.levels) {
    if (spec.physical) spec.physical->levels = *a.levels;
    if (*a.levels != b.levels) {
      b.levels = *a.levels;
      b.p_conn.assign(static_cast<std::size_t>(b.levels), b.p_conn.empty() ? 1.0 : b.p_conn.front());
      b.level_latency = default_level_latency(b.levels);
    }
  }
  if (a.p0) {
    if (spec.physical) throw UsageError("--p0 conflicts with DLCZ-derived probabilities");
    b.p_gen = *a.p0;
  }
  if (a.p1) {
    if (spec.physical) throw UsageError("--p1 conflicts with DLCZ-derived probabilities");
    auto v = doubles(*a.p1);
    if (v.size() == 1) v.assign(static_cast<std::size_t>(b.levels), v.front());
    b.p_conn = v;
  }
  if (a.latency) b.level_latency = ints(*a.latency);
  if (a.projection) b.final_projection = *a.projection;
  if (a.no_concurrent) b.concurrent_generation = false;
  if (a.tau) {
    apply_list_flag(spec, "tau", *a.tau, [&](const std::string& v) { b.tau = TimeUnits(parse_int(v)); });
    drop_axis(spec, "tau_ms");
  }
  if (a.n) apply_list_flag(spec, "n", *a.n, [&](const std::string& v) { b.elements = static_cast<int>(parse_int(v)); });
  if (a.architecture) {
    apply_list_flag(spec, "architecture", *a.architecture,
                    [&](const std::string& v) { b.architecture = parse_architecture(v); });
  }
  if (a.trials && a.horizon) throw UsageError("--trials and --horizon are mutually exclusive");
  if (a.trials) spec.budget = sim::TrialBudget{*a.trials};
  if (a.horizon) spec.budget = sim::HorizonBudget{*a.horizon, a.batches.value_or(30)};
  if (a.batches && !a.horizon) {
    auto* h = std::get_if<sim::HorizonBudget>(&spec.budget);
    if (!h) throw UsageError("--batches needs a horizon budget");
    h->batches = *a.batches;
  }
  if (a.json) spec.format = OutputFormat::JsonLines;
  if (!a.out.empty()) spec.output_path = a.out;
  if (!spec.physical) validate(spec.base);
  spec.check();
  for (std::size_t i = 0; i < spec.size(); ++i) validate(spec.point(i));

  SweepOptions options;
  options.threads = a.threads;
  if (a.max_time) options.limits.max_time = *a.max_time;

  KeyValueConfig resolved;
  write_sweep_spec(resolved, spec);
  resolved.set("run.seed", std::to_string(a.seed));
  resolved.set("run.points", std::to_string(spec.size()));
  if (spec.physical) {
    const auto d = dlcz::derive(*spec.physical);
    resolved.set("derived.p0", format_double(d.p0));
    resolved.set("derived.p_conn", format_list(d.p_conn));
    resolved.set("derived.time_unit_ms", format_double(d.time_unit_ms));
    if (d.epsilon) resolved.set("derived.epsilon", format_double(*d.epsilon));
  }
  std::cerr << "# resolved configuration\n" << resolved.serialize();

  const auto rows = sweep(spec, a.seed, options);
  Output out(spec.output_path);
  if (spec.format == OutputFormat::JsonLines) {
    for (const auto& r : rows) out.stream() << report::to_json(r).dump() << '\n';
  } else {
    report::write_sweep_csv(out.stream(), rows);
  }
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<std::string> suites;
  double perturb_p1 = 0.0;
  std::uint64_t seed = 1;
  bool json = false;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  verify::Options options;
  options.perturb_p1 = a.perturb_p1;
  options.seed = a.seed;
  std::vector<verify::CheckResult> results;
  const auto& suites = a.suites.empty() ? verify::suite_names() : a.suites;
  for (const auto& s : suites) {
    auto part = verify::run_suite(s, options);
    results.insert(results.end(), part.begin(), part.end());
  }
  Output out(a.out);
  if (a.json) {
    out.stream() << verify::to_json(results).dump(2) << '\n';
  } else {
    std::size_t failed = 0;
    for (const auto& r : results) {
      if (!r.passed) ++failed;
      out.stream() << (r.passed ? "PASS " : "FAIL ") << r.suite << ": " << r.name << "  observed "
                   << format_double(r.observed) << " expected " << format_double(r.expected) << " tol "
                   << format_double(r.tolerance) << '\n';
    }
    out.stream() << results.size() - failed << "/" << results.size() << " checks passed\n";
  }
  return verify::all_passed(results) ? 0 : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplexed and parallel quantum repeater rates: closed forms, DLCZ probabilities, simulation."};
  app.require_subcommand(1);

  AnalyticArgs an;
  auto* analytic = app.add_subcommand("analytic", "Closed-form waiting times and rates over a parameter grid");
  analytic->add_option("--p0", an.p0, "Generation probability (comma list)");
  analytic->add_option("--p1", an.p1, "Connection probability (comma list)");
  analytic->add_option("--tau", an.tau, "Memory lifetime in time units (comma list)");
  analytic->add_option("--n", an.n, "Elements per site (comma list)");
  analytic->add_option("--preset", an.preset, "fig2 or fig3");
  analytic->add_flag("--terms", an.terms, "Add the three <Z> contributions and the small-p0 approximation");
  analytic->add_flag("--json", an.json, "JSON lines instead of CSV");
  analytic->add_option("--out", an.out, "Output file (default stdout)");

  DlczArgs dl;
  auto* dlcz_cmd = app.add_subcommand("dlcz", "Connection probabilities for an atomic-ensemble repeater");
  dlcz_cmd->add_option("--length", dl.length_km, "Total length in km");
  dlcz_cmd->add_option("--N", dl.levels, "Nesting levels");
  dlcz_cmd->add_option("--loss", dl.loss, "Fiber loss in dB/km");
  dlcz_cmd->add_option("--eta0", dl.eta0, "Generation efficiency");
  dlcz_cmd->add_option("--eta", dl.eta, "Detection-retrieval efficiency");
  dlcz_cmd->add_option("--detector", dl.detector, "PNRD or NPRD");
  dlcz_cmd->add_option("--index", dl.index, "Fiber refractive index");
  dlcz_cmd->add_option("--tau-ms", dl.tau_ms, "Lifetimes in ms to convert to time units")->delimiter(',');
  dlcz_cmd->add_option("--config", dl.config, "Config file with physical.* keys");
  dlcz_cmd->add_flag("--json", dl.json, "JSON instead of CSV");
  dlcz_cmd->add_option("--out", dl.out, "Output file (default stdout)");

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rate estimates for one point or a sweep");
  simulate->add_option("--preset", si.preset, "fig3 or fig4");
  simulate->add_option("--config", si.config, "Config file (repeater.*, physical.*, sweep.*, budget.*, output.*)");
  simulate->add_option("--p0", si.p0, "Generation probability");
  simulate->add_option("--p1,--p-conn", si.p1, "Connection probability, one value or one per level");
  simulate->add_option("--tau", si.tau, "Memory lifetime in time units (comma list sweeps)");
  simulate->add_option("--n", si.n, "Elements per site (comma list sweeps)");
  simulate->add_option("--N", si.levels, "Nesting levels");
  simulate->add_option("--architecture", si.architecture, "parallel or multiplexed (comma list sweeps)");
  simulate->add_option("--latency", si.latency, "Connection latency per level in time units (comma list)");
  simulate->add_option("--projection", si.projection, "Final projection success probability");
  simulate->add_flag("--no-concurrent-generation", si.no_concurrent,
                     "Pause generation on segments spanned by an in-flight connection");
  simulate->add_option("--trials", si.trials, "Independent trials per point");
  simulate->add_option("--horizon", si.horizon, "Steady-state horizon in time units per point");
  simulate->add_option("--batches", si.batches, "Batches for the steady-state error estimate");
  simulate->add_option("--seed", si.seed, "Base seed");
  simulate->add_option("--threads", si.threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--max-time", si.max_time, "Truncate trials at this many time units");
  simulate->add_flag("--json", si.json, "JSON lines instead of CSV");
  simulate->add_option("--out", si.out, "Output file (default stdout)");

  VerifyArgs ve;
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in consistency checks");
  verify_cmd->add_option("--suite", ve.suites, "identity, oracle, dlcz, limits, simulation (repeatable)")
      ->check(CLI::IsMember(verify::suite_names()));
  verify_cmd->add_option("--perturb-p1", ve.perturb_p1, "Relative error injected into p1 (verifier self-test)");
  verify_cmd->add_option("--seed", ve.seed, "Seed for the simulation suite");
  verify_cmd->add_flag("--json", ve.json, "JSON report");
  verify_cmd->add_option("--out", ve.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (analytic->parsed()) {
      std::vector<std::string> flags;
      for (const auto* opt : analytic->get_options()) {
        if (opt->count() > 0) flags.push_back(opt->get_name());
      }
      return run_analytic(an, flags);
    }
    if (dlcz_cmd->parsed()) return run_dlcz(dl);
    if (simulate->parsed()) return run_simulate(si);
    if (verify_cmd->parsed()) return run_verify(ve);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DivergentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
