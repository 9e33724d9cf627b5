#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "muxrep/config.hpp"
#include "muxrep/dlcz.hpp"
#include "muxrep/simulator.hpp"

namespace muxrep {

enum class OutputFormat { Csv, JsonLines };

struct SweepAxis {
  std::string name;  // tau, tau_ms, n, architecture, p_gen, p1, concurrent_generation
  std::vector<std::string> values;
};

struct SweepSpec {
  RepeaterParams base;
  // When set, p_gen / p_conn come from the physical model and the tau_ms axis
  // is available.
  std::optional<dlcz::PhysicalParams> physical;
  bool apply_final_projection = false;
  std::vector<SweepAxis> axes;
  sim::Budget budget = sim::TrialBudget{1000};
  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::Csv;

  /// Size of the cross product; 1 when there are no axes.
  std::size_t size() const;
  /// Throws ValidationError for unknown axis names or empty axes.
  void check() const;
  /// Parameters of grid point `index` (last axis varies fastest).
  RepeaterParams point(std::size_t index) const;
  /// tau_ms coordinate of the point, when swept.
  std::optional<double> tau_ms(std::size_t index) const;
  std::vector<std::pair<std::string, std::string>> coordinates(std::size_t index) const;
};

struct SweepRow {
  std::size_t index = 0;
  RepeaterParams params;
  std::optional<double> tau_ms;
  std::uint64_t seed = 0;
  std::optional<sim::RateEstimate> estimate;
  std::string error;  // non-empty when the point failed
};

struct SweepOptions {
  int threads = 1;
  sim::TrialLimits limits;
};

/// Evaluates every grid point with seed derive_seed(base_seed, index). Rows
/// come back in grid order whatever the thread count. A failing point yields a
/// row with `error` set; the sweep continues.
std::vector<SweepRow> sweep(const SweepSpec& spec, std::uint64_t base_seed, const SweepOptions& options = {});

void write_sweep_spec(KeyValueConfig& cfg, const SweepSpec& spec);
SweepSpec read_sweep_spec(const KeyValueConfig& cfg, SweepSpec base = {});

void write_physical_params(KeyValueConfig& cfg, const dlcz::PhysicalParams& phys, const std::string& prefix = "physical");
dlcz::PhysicalParams read_physical_params(const KeyValueConfig& cfg, dlcz::PhysicalParams base = {},
                                          const std::string& prefix = "physical");

}  // namespace muxrep
