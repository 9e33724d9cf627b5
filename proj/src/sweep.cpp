#include "muxrep/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace muxrep {

namespace {

const std::vector<std::string>& axis_names() {
  static const std::vector<std::string> names{"tau", "tau_ms", "n", "architecture", "p_gen", "p1",
                                              "concurrent_generation"};
  return names;
}

bool parse_flag(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ValidationError("not a boolean: '" + text + "'");
}

std::vector<std::size_t> unravel(const std::vector<SweepAxis>& axes, std::size_t index) {
  std::vector<std::size_t> at(axes.size(), 0);
  for (std::size_t i = axes.size(); i-- > 0;) {
    const std::size_t len = axes[i].values.size();
    at[i] = index % len;
    index /= len;
  }
  return at;
}

}  // namespace

std::size_t SweepSpec::size() const {
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  return total;
}

void SweepSpec::check() const {
  for (const auto& a : axes) {
    if (std::find(axis_names().begin(), axis_names().end(), a.name) == axis_names().end()) {
      throw ValidationError("unknown sweep axis: " + a.name);
    }
    if (a.values.empty()) throw ValidationError("empty sweep axis: " + a.name);
    if (a.name == "tau_ms" && !physical) throw ValidationError("tau_ms axis needs physical parameters");
  }
}

RepeaterParams SweepSpec::point(std::size_t index) const {
  check();
  RepeaterParams p = base;
  std::optional<dlcz::DerivedProbabilities> derived;
  if (physical) {
    derived = dlcz::derive(*physical);
    p.levels = physical->levels;
    p.p_gen = derived->p0;
    p.p_conn = derived->p_conn;
    if (p.level_latency.size() != p.p_conn.size()) p.level_latency = default_level_latency(p.levels);
    p.final_projection = apply_final_projection ? derived->epsilon : std::nullopt;
  }
  const auto at = unravel(axes, index);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string& name = axes[i].name;
    const std::string& value = axes[i].values[at[i]];
    if (name == "tau") {
      p.tau = TimeUnits(parse_int(value));
    } else if (name == "tau_ms") {
      p.tau = dlcz::lifetime_to_units(parse_double(value), *derived);
    } else if (name == "n") {
      p.elements = static_cast<int>(parse_int(value));
    } else if (name == "architecture") {
      p.architecture = parse_architecture(value);
    } else if (name == "p_gen") {
      p.p_gen = parse_double(value);
    } else if (name == "p1") {
      if (p.p_conn.empty()) throw ValidationError("p1 axis on a chain without levels");
      p.p_conn[0] = parse_double(value);
    } else if (name == "concurrent_generation") {
      p.concurrent_generation = parse_flag(value);
    }
  }
  return p;
}

std::optional<double> SweepSpec::tau_ms(std::size_t index) const {
  const auto at = unravel(axes, index);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i].name == "tau_ms") return parse_double(axes[i].values[at[i]]);
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> SweepSpec::coordinates(std::size_t index) const {
  const auto at = unravel(axes, index);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < axes.size(); ++i) out.emplace_back(axes[i].name, axes[i].values[at[i]]);
  return out;
}

std::vector<SweepRow> sweep(const SweepSpec& spec, std::uint64_t base_seed, const SweepOptions& options) {
  spec.check();
  const std::size_t count = spec.size();
  if (count == 0) throw ValidationError("empty sweep grid");
  std::vector<SweepRow> rows(count);

  auto evaluate = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.index = i;
    row.seed = derive_seed(base_seed, i);
    try {
      row.tau_ms = spec.tau_ms(i);
      row.params = spec.point(i);
      row.estimate = sim::estimate_rate(row.params, row.seed, spec.budget, {1, options.limits});
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(count)));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) evaluate(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) evaluate(i);
    });
  }
  for (auto& th : pool) th.join();
  return rows;
}

void write_physical_params(KeyValueConfig& cfg, const dlcz::PhysicalParams& phys, const std::string& prefix) {
  const auto key = [&](const char* name) { return prefix + "." + name; };
  cfg.set(key("total_length_km"), format_double(phys.total_length_km));
  cfg.set(key("levels"), std::to_string(phys.levels));
  cfg.set(key("fiber_loss_db_per_km"), format_double(phys.fiber_loss_db_per_km));
  cfg.set(key("eta0"), format_double(phys.eta0));
  cfg.set(key("eta"), format_double(phys.eta));
  cfg.set(key("detector"), std::string(dlcz::to_string(phys.detector)));
  cfg.set(key("refractive_index"), format_double(phys.refractive_index));
}

dlcz::PhysicalParams read_physical_params(const KeyValueConfig& cfg, dlcz::PhysicalParams base,
                                          const std::string& prefix) {
  const auto key = [&](const char* name) { return prefix + "." + name; };
  dlcz::PhysicalParams p = base;
  if (auto v = cfg.get_double(key("total_length_km"))) p.total_length_km = *v;
  if (auto v = cfg.get_int(key("levels"))) p.levels = static_cast<int>(*v);
  if (auto v = cfg.get_double(key("fiber_loss_db_per_km"))) p.fiber_loss_db_per_km = *v;
  if (auto v = cfg.get_double(key("eta0"))) p.eta0 = *v;
  if (auto v = cfg.get_double(key("eta"))) p.eta = *v;
  if (auto v = cfg.get_string(key("detector"))) p.detector = dlcz::parse_detector(*v);
  if (auto v = cfg.get_double(key("refractive_index"))) p.refractive_index = *v;
  dlcz::validate(p);
  return p;
}

void write_sweep_spec(KeyValueConfig& cfg, const SweepSpec& spec) {
  write_repeater_params(cfg, spec.base);
  if (spec.physical) {
    cfg.set("sweep.derive", "true");
    write_physical_params(cfg, *spec.physical);
  }
  cfg.set("sweep.apply_final_projection", spec.apply_final_projection ? "true" : "false");
  for (const auto& axis : spec.axes) {
    std::string joined;
    for (std::size_t i = 0; i < axis.values.size(); ++i) joined += (i ? ", " : "") + axis.values[i];
    cfg.set("sweep.axis." + axis.name, joined);
  }
  if (const auto* t = std::get_if<sim::TrialBudget>(&spec.budget)) {
    cfg.set("budget.trials", std::to_string(t->trials));
  } else {
    const auto& h = std::get<sim::HorizonBudget>(spec.budget);
    cfg.set("budget.horizon", std::to_string(h.horizon));
    cfg.set("budget.batches", std::to_string(h.batches));
  }
  if (!spec.output_path.empty()) cfg.set("output.path", spec.output_path);
  cfg.set("output.format", spec.format == OutputFormat::Csv ? "csv" : "jsonl");
}

SweepSpec read_sweep_spec(const KeyValueConfig& cfg, SweepSpec base) {
  SweepSpec spec = std::move(base);
  if (cfg.get_bool("sweep.derive").value_or(spec.physical.has_value()) || !cfg.section("physical").empty()) {
    spec.physical = read_physical_params(cfg, spec.physical.value_or(dlcz::PhysicalParams{}));
  }
  // With derivation the probabilities are filled per point; validate after.
  RepeaterParams fallback = spec.base;
  if (spec.physical) {
    fallback.levels = spec.physical->levels;
    fallback.p_conn.assign(static_cast<std::size_t>(fallback.levels), 1.0);
    fallback.level_latency = default_level_latency(fallback.levels);
    KeyValueConfig without_probs = cfg;
    without_probs.erase("repeater.p_conn");
    without_probs.erase("repeater.p_gen");
    without_probs.erase("repeater.N");
    spec.base = read_repeater_params(without_probs, fallback);
  } else {
    spec.base = read_repeater_params(cfg, fallback);
  }
  if (auto v = cfg.get_bool("sweep.apply_final_projection")) spec.apply_final_projection = *v;
  const auto axes = cfg.section("sweep.axis");
  if (!axes.empty()) {
    spec.axes.clear();
    for (const auto& [name, values] : axes) spec.axes.push_back({name, split_list(values)});
  }
  if (auto v = cfg.get_int("budget.trials")) spec.budget = sim::TrialBudget{static_cast<std::uint64_t>(*v)};
  if (auto v = cfg.get_int("budget.horizon")) {
    sim::HorizonBudget h;
    h.horizon = *v;
    if (auto b = cfg.get_int("budget.batches")) h.batches = static_cast<int>(*b);
    spec.budget = h;
  }
  if (auto v = cfg.get_string("output.path")) spec.output_path = *v;
  if (auto v = cfg.get_string("output.format")) {
    if (*v == "csv") {
      spec.format = OutputFormat::Csv;
    } else if (*v == "jsonl" || *v == "json") {
      spec.format = OutputFormat::JsonLines;
    } else {
      throw ConfigError("output.format: expected csv or jsonl");
    }
  }
  spec.check();
  return spec;
}

}  // namespace muxrep
