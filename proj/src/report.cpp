#include "muxrep/report.hpp"

#include <cmath>
#include <ostream>

#include "muxrep/config.hpp"

namespace muxrep::report {

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::string join(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_double(values[i]);
  }
  return out;
}

std::string join(const std::vector<std::int64_t>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

nlohmann::json opt(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string csv_field(std::optional<double> value) { return value ? format_double(*value) : std::string(); }

AnalyticRow analytic_row(double p0, double p1, std::int64_t tau, int n) {
  AnalyticRow row;
  row.p0 = p0;
  row.p1 = p1;
  row.tau = tau;
  row.n = n;
  const TimeUnits t(tau);
  if (n == 1) {
    row.terms = analytics::mean_Z_terms(p0, t);
    row.mean_Z = row.terms->total();
    row.mean_T = analytics::mean_time_finite(p0, p1, t);
  }
  const auto mux = analytics::multiplexed_rate(p0, p1, t, n);
  row.rate = mux.rate;
  row.alpha = mux.alpha;
  row.in_regime = analytics::asymptotic_regime(p0, t);
  row.mean_Z_asymptotic = analytics::mean_Z_asymptotic(p0, t);
  return row;
}

std::vector<AnalyticRow> analytic_table(const std::vector<double>& p0s, const std::vector<double>& p1s,
                                        const std::vector<std::int64_t>& taus, const std::vector<int>& ns) {
  std::vector<AnalyticRow> rows;
  for (double p0 : p0s) {
    for (double p1 : p1s) {
      for (int n : ns) {
        for (auto tau : taus) rows.push_back(analytic_row(p0, p1, tau, n));
      }
    }
  }
  return rows;
}

const std::vector<std::string>& analytic_columns(bool with_terms) {
  static const std::vector<std::string> base{"p0", "p1", "tau", "n", "mean_Z", "mean_T", "rate", "alpha", "regime_flag"};
  static const std::vector<std::string> extended = [] {
    auto cols = base;
    for (const char* c : {"Z_waiting", "Z_fruitless", "Z_second", "mean_Z_asymptotic"}) cols.emplace_back(c);
    return cols;
  }();
  return with_terms ? extended : base;
}

void write_analytic_csv(std::ostream& out, const std::vector<AnalyticRow>& rows, bool with_terms) {
  write_line(out, analytic_columns(with_terms));
  for (const auto& r : rows) {
    std::vector<std::string> f{format_double(r.p0), format_double(r.p1), std::to_string(r.tau), std::to_string(r.n),
                               csv_field(r.mean_Z),  csv_field(r.mean_T),  format_double(r.rate),
                               format_double(r.alpha), r.in_regime ? "in_regime" : "out_of_regime"};
    if (with_terms) {
      f.push_back(csv_field(r.terms ? std::optional(r.terms->waiting) : std::nullopt));
      f.push_back(csv_field(r.terms ? std::optional(r.terms->fruitless) : std::nullopt));
      f.push_back(csv_field(r.terms ? std::optional(r.terms->second) : std::nullopt));
      f.push_back(csv_field(r.mean_Z_asymptotic));
    }
    write_line(out, f);
  }
}

nlohmann::json to_json(const AnalyticRow& r, bool with_terms) {
  nlohmann::json j{{"p0", r.p0},       {"p1", r.p1},         {"tau", r.tau},     {"n", r.n},
                   {"mean_Z", opt(r.mean_Z)}, {"mean_T", opt(r.mean_T)}, {"rate", r.rate}, {"alpha", r.alpha},
                   {"regime_flag", r.in_regime ? "in_regime" : "out_of_regime"}};
  if (with_terms) {
    j["Z_waiting"] = r.terms ? nlohmann::json(r.terms->waiting) : nlohmann::json(nullptr);
    j["Z_fruitless"] = r.terms ? nlohmann::json(r.terms->fruitless) : nlohmann::json(nullptr);
    j["Z_second"] = r.terms ? nlohmann::json(r.terms->second) : nlohmann::json(nullptr);
    j["mean_Z_asymptotic"] = opt(r.mean_Z_asymptotic);
  }
  return j;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "index",     "N",         "n",        "tau",        "tau_ms",         "architecture", "p_gen",
      "p_conn",    "level_latency", "concurrent_generation", "final_projection", "method", "budget", "seed",
      "rate",      "std_error", "successes", "mean_time", "mean_time_std_error", "projected_rate", "truncated",
      "flag"};
  return cols;
}

namespace {

std::string row_flag(const SweepRow& row) {
  if (!row.error.empty()) return "error: " + row.error;
  if (row.estimate->no_successes) return "no successes";
  if (row.estimate->truncated > 0) return "truncated";
  return "ok";
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  write_line(out, sweep_columns());
  for (const auto& row : rows) {
    const auto& p = row.params;
    const auto* e = row.estimate ? &*row.estimate : nullptr;
    std::vector<std::string> f{
        std::to_string(row.index),
        std::to_string(p.levels),
        std::to_string(p.elements),
        std::to_string(p.tau.value()),
        csv_field(row.tau_ms),
        std::string(to_string(p.architecture)),
        format_double(p.p_gen),
        join(p.p_conn, ';'),
        join(p.level_latency, ';'),
        p.concurrent_generation ? "true" : "false",
        csv_field(p.final_projection),
        e ? std::string(sim::to_string(e->method)) : std::string(),
        e ? std::to_string(e->trials_or_horizon) : std::string(),
        std::to_string(row.seed),
        e ? format_double(e->mean_rate) : std::string(),
        e ? format_double(e->std_error) : std::string(),
        e ? std::to_string(e->successes) : std::string(),
        e && e->successes ? format_double(e->mean_time) : std::string(),
        e && e->method == sim::EstimateMethod::IndependentTrials && e->successes ? format_double(e->mean_time_std_error)
                                                                                  : std::string(),
        e ? csv_field(e->projected_rate) : std::string(),
        e ? std::to_string(e->truncated) : std::string(),
        csv_quote(row_flag(row))};
    write_line(out, f);
  }
}

nlohmann::json to_json(const SweepRow& row) {
  const auto& p = row.params;
  nlohmann::json j{{"index", row.index},
                   {"N", p.levels},
                   {"n", p.elements},
                   {"tau", p.tau.value()},
                   {"tau_ms", opt(row.tau_ms)},
                   {"architecture", std::string(to_string(p.architecture))},
                   {"p_gen", p.p_gen},
                   {"p_conn", p.p_conn},
                   {"level_latency", p.level_latency},
                   {"concurrent_generation", p.concurrent_generation},
                   {"final_projection", opt(p.final_projection)},
                   {"seed", row.seed},
                   {"flag", row_flag(row)}};
  if (row.estimate) {
    const auto& e = *row.estimate;
    j["method"] = std::string(sim::to_string(e.method));
    j["budget"] = e.trials_or_horizon;
    j["rate"] = e.mean_rate;
    j["std_error"] = e.std_error;
    j["successes"] = e.successes;
    j["mean_time"] = e.successes ? nlohmann::json(e.mean_time) : nlohmann::json(nullptr);
    j["mean_time_std_error"] = e.method == sim::EstimateMethod::IndependentTrials && e.successes
                                   ? nlohmann::json(e.mean_time_std_error)
                                   : nlohmann::json(nullptr);
    j["projected_rate"] = opt(e.projected_rate);
    j["truncated"] = e.truncated;
  }
  return j;
}

std::vector<std::pair<std::string, double>> dlcz_quantities(const dlcz::DerivedProbabilities& d) {
  std::vector<std::pair<std::string, double>> q;
  q.emplace_back("L0_km", d.segment_length_km);
  q.emplace_back("p0", d.p0);
  for (std::size_t i = 0; i < d.p_conn.size(); ++i) q.emplace_back("P_" + std::to_string(i + 1), d.p_conn[i]);
  for (std::size_t i = 0; i < d.c.size(); ++i) q.emplace_back("c_" + std::to_string(i), d.c[i]);
  if (d.epsilon) q.emplace_back("epsilon", *d.epsilon);
  q.emplace_back("fidelity_bound", d.fidelity_bound);
  q.emplace_back("time_unit_ms", d.time_unit_ms);
  return q;
}

void write_dlcz_csv(std::ostream& out, const dlcz::DerivedProbabilities& d) {
  out << "quantity,value\n";
  for (const auto& [name, value] : dlcz_quantities(d)) out << name << ',' << format_double(value) << '\n';
}

nlohmann::json to_json(const dlcz::DerivedProbabilities& d) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, value] : dlcz_quantities(d)) j[name] = value;
  return j;
}

}  // namespace muxrep::report
