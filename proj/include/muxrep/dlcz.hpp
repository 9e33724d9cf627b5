#pragma once

// Connection probabilities for an atomic-ensemble (DLCZ-type) repeater.
//
// With c_0 = 0 (no dark counts) and beta the detector factor,
//   P_0 = eta0 exp(-gamma L_0 / 2)
//   P_i = eta/(c_{i-1}+1) * (1 - eta/(2 beta (c_{i-1}+1)))
//   c_i = 2 c_{i-1} + 1 - eta/beta
// Non-resolving detectors need a final projective measurement that succeeds
// with probability 1/(c_N + 1).

#include <optional>
#include <vector>

#include "muxrep/types.hpp"

namespace muxrep::dlcz {

enum class Detector {
  PNRD,  // photon-number resolving, beta = 1
  NPRD,  // non-resolving, beta = 2
};

std::string_view to_string(Detector d);
Detector parse_detector(std::string_view text);
constexpr double beta(Detector d) { return d == Detector::PNRD ? 1.0 : 2.0; }

inline constexpr double kSpeedOfLightMps = 299792458.0;

struct PhysicalParams {
  double total_length_km = 1000.0;
  int levels = 3;
  double fiber_loss_db_per_km = 0.16;
  double eta0 = 0.01;
  double eta = 0.9;
  Detector detector = Detector::NPRD;
  double refractive_index = 1.5;

  double segment_length_km() const;
  /// Loss in nepers per km.
  double gamma_per_km() const;

  bool operator==(const PhysicalParams&) const = default;
};

void validate(const PhysicalParams& phys);

struct DerivedProbabilities {
  double p0 = 0.0;
  std::vector<double> p_conn;   // P_1..P_N
  std::vector<double> c;        // c_0..c_N
  std::optional<double> epsilon;
  double fidelity_bound = 0.0;  // 2^N (1 - eta0)
  double time_unit_ms = 0.0;    // L_0 / (c / refractive_index)
  double segment_length_km = 0.0;
};

DerivedProbabilities derive(const PhysicalParams& phys);

/// floor(tau_ms / time_unit_ms).
TimeUnits lifetime_to_units(double tau_ms, const DerivedProbabilities& derived);

/// Fills a RepeaterParams from derived probabilities; latencies take the
/// default per-level values.
RepeaterParams to_repeater_params(const DerivedProbabilities& derived, int elements, TimeUnits tau,
                                  Architecture arch, bool apply_final_projection);

}  // namespace muxrep::dlcz
