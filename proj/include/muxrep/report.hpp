#pragma once

// Tabular output. CSV files have a header row, a fixed column order and
// locale-independent shortest round-trip numbers. List-valued fields
// (p_conn, level_latency) are ';'-separated inside one CSV field. Missing
// values are empty fields in CSV and null in JSON.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "muxrep/analytics.hpp"
#include "muxrep/dlcz.hpp"
#include "muxrep/sweep.hpp"

#include <json.hpp>

namespace muxrep::report {

struct AnalyticRow {
  double p0 = 0.0;
  double p1 = 0.0;
  std::int64_t tau = 0;
  int n = 1;
  std::optional<double> mean_Z;  // n = 1 only
  std::optional<double> mean_T;  // n = 1 only
  double rate = 0.0;
  double alpha = 1.0;
  bool in_regime = false;        // p0 (tau+1) < 1
  std::optional<analytics::WaitingTerms> terms;
  std::optional<double> mean_Z_asymptotic;
};

AnalyticRow analytic_row(double p0, double p1, std::int64_t tau, int n);
std::vector<AnalyticRow> analytic_table(const std::vector<double>& p0s, const std::vector<double>& p1s,
                                        const std::vector<std::int64_t>& taus, const std::vector<int>& ns);

const std::vector<std::string>& analytic_columns(bool with_terms);
void write_analytic_csv(std::ostream& out, const std::vector<AnalyticRow>& rows, bool with_terms);
nlohmann::json to_json(const AnalyticRow& row, bool with_terms);

const std::vector<std::string>& sweep_columns();
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
nlohmann::json to_json(const SweepRow& row);

/// (quantity, value) pairs for a derivation, in display order.
std::vector<std::pair<std::string, double>> dlcz_quantities(const dlcz::DerivedProbabilities& d);
void write_dlcz_csv(std::ostream& out, const dlcz::DerivedProbabilities& d);
nlohmann::json to_json(const dlcz::DerivedProbabilities& d);

std::string csv_field(std::optional<double> value);

}  // namespace muxrep::report
