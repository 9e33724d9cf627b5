#include "muxrep/presets.hpp"

namespace muxrep::presets {

dlcz::PhysicalParams long_link() {
  dlcz::PhysicalParams p;
  p.total_length_km = 1000.0;
  p.levels = 3;
  p.fiber_loss_db_per_km = 0.16;
  p.eta0 = 0.01;
  p.eta = 0.9;
  p.detector = dlcz::Detector::NPRD;
  p.refractive_index = 1.5;
  return p;
}

AnalyticGrid fig2() {
  AnalyticGrid g;
  g.p0s = {0.01};
  g.p1s = {0.5};
  g.taus = {0, 1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 100, 150, 200, 300, 500, 700, 1000, 2000, 5000};
  g.ns = {1};
  return g;
}

std::vector<std::int64_t> fig3_taus() { return {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000}; }

SweepSpec fig3() {
  SweepSpec s;
  s.base = doubling_params(0.01, 0.1, 1);
  std::vector<std::string> taus;
  for (auto t : fig3_taus()) taus.push_back(std::to_string(t));
  s.axes = {{"architecture", {"parallel", "multiplexed"}}, {"n", {"1", "5", "10"}}, {"tau", taus}};
  s.budget = sim::HorizonBudget{10'000'000, 30};
  return s;
}

AnalyticGrid fig3_analytic() {
  AnalyticGrid g;
  g.p0s = {0.01};
  g.p1s = {0.1};
  g.taus = fig3_taus();
  g.ns = {1, 5, 10};
  return g;
}

SweepSpec fig4() {
  SweepSpec s;
  s.physical = long_link();
  s.apply_final_projection = true;
  s.base.levels = 3;
  s.base.p_conn = {1.0, 1.0, 1.0};
  s.base.level_latency = default_level_latency(3);
  s.base.concurrent_generation = true;
  s.axes = {{"architecture", {"multiplexed", "parallel"}},
            {"n", {"1", "10", "100"}},
            {"tau_ms", {"100", "250", "500", "1000", "2500"}}};
  s.budget = sim::HorizonBudget{2'000'000, 20};
  return s;
}

std::vector<std::string> names() { return {"fig2", "fig3", "fig4"}; }

}  // namespace muxrep::presets
