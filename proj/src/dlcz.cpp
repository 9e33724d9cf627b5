#include "muxrep/dlcz.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace muxrep::dlcz {

std::string_view to_string(Detector d) { return d == Detector::PNRD ? "PNRD" : "NPRD"; }

Detector parse_detector(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "PNRD") return Detector::PNRD;
  if (upper == "NPRD") return Detector::NPRD;
  throw ValidationError("unknown detector: " + std::string(text));
}

double PhysicalParams::segment_length_km() const { return total_length_km / std::ldexp(1.0, levels); }

double PhysicalParams::gamma_per_km() const { return fiber_loss_db_per_km * std::log(10.0) / 10.0; }

void validate(const PhysicalParams& phys) {
  if (!(phys.total_length_km > 0.0)) throw ValidationError("total length must be positive");
  if (phys.levels < 1 || phys.levels > 20) {
    throw ValidationError("levels out of range: N = " + std::to_string(phys.levels));
  }
  if (!(phys.fiber_loss_db_per_km >= 0.0)) throw ValidationError("fiber loss must be non-negative");
  if (!(phys.eta0 >= 0.0 && phys.eta0 <= 1.0)) {
    throw ValidationError("probability out of range: eta0 = " + std::to_string(phys.eta0));
  }
  if (!(phys.eta >= 0.0 && phys.eta <= 1.0)) {
    throw ValidationError("probability out of range: eta = " + std::to_string(phys.eta));
  }
  if (!(phys.refractive_index >= 1.0)) throw ValidationError("refractive index must be >= 1");
}

DerivedProbabilities derive(const PhysicalParams& phys) {
  validate(phys);
  const double b = beta(phys.detector);
  const double l0 = phys.segment_length_km();

  DerivedProbabilities out;
  out.segment_length_km = l0;
  out.p0 = phys.eta0 * std::exp(-phys.gamma_per_km() * l0 / 2.0);
  out.c.push_back(0.0);
  for (int i = 1; i <= phys.levels; ++i) {
    const double prev = out.c.back() + 1.0;
    out.p_conn.push_back((phys.eta / prev) * (1.0 - phys.eta / (2.0 * b * prev)));
    out.c.push_back(2.0 * out.c.back() + 1.0 - phys.eta / b);
  }
  if (phys.detector == Detector::NPRD) out.epsilon = 1.0 / (out.c.back() + 1.0);
  out.fidelity_bound = std::ldexp(1.0, phys.levels) * (1.0 - phys.eta0);
  const double signal_speed_mps = kSpeedOfLightMps / phys.refractive_index;
  out.time_unit_ms = l0 * 1e3 / signal_speed_mps * 1e3;
  return out;
}

TimeUnits lifetime_to_units(double tau_ms, const DerivedProbabilities& derived) {
  if (!(tau_ms >= 0.0)) throw ValidationError("lifetime must be non-negative");
  if (!(derived.time_unit_ms > 0.0)) throw ValidationError("time unit must be positive");
  return TimeUnits(static_cast<std::int64_t>(std::floor(tau_ms / derived.time_unit_ms)));
}

RepeaterParams to_repeater_params(const DerivedProbabilities& derived, int elements, TimeUnits tau,
                                  Architecture arch, bool apply_final_projection) {
  RepeaterParams p;
  p.levels = static_cast<int>(derived.p_conn.size());
  p.elements = elements;
  p.tau = tau;
  p.p_gen = derived.p0;
  p.p_conn = derived.p_conn;
  p.level_latency = default_level_latency(p.levels);
  p.architecture = arch;
  if (apply_final_projection) p.final_projection = derived.epsilon;
  validate(p);
  return p;
}

}  // namespace muxrep::dlcz
