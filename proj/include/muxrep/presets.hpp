#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "muxrep/dlcz.hpp"
#include "muxrep/sweep.hpp"

namespace muxrep::presets {

/// The 1000 km, N = 3 atomic-ensemble link with non-resolving detectors:
/// 0.16 dB/km, eta0 = 0.01, eta = 0.9.
dlcz::PhysicalParams long_link();

struct AnalyticGrid {
  std::vector<double> p0s;
  std::vector<double> p1s;
  std::vector<std::int64_t> taus;
  std::vector<int> ns;
};

/// <T>_tau against tau at P0 = 0.01, P1 = 0.5.
AnalyticGrid fig2();

/// Memory-lifetime grid shared by the fig3 preset and its analytic companion.
std::vector<std::int64_t> fig3_taus();

/// N = 1, P0 = 0.01, P1 = 0.1; parallel and multiplexed, n in {1, 5, 10},
/// log-spaced tau. Batch-means budget.
SweepSpec fig3();
/// Analytic counterpart of fig3 (closed forms over the same grid).
AnalyticGrid fig3_analytic();

/// N = 3 long link, tau given in milliseconds; both architectures at several
/// n, final projection applied so rows carry both raw and projected rates.
SweepSpec fig4();

std::vector<std::string> names();  // fig2, fig3, fig4

}  // namespace muxrep::presets
