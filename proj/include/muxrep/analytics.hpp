#pragma once

// Closed-form waiting times and rates for a single entanglement-length
// doubling (N = 1): two fundamental segments, each generating entanglement
// with probability p0 per time unit, joined by a connection that takes one
// time unit and succeeds with probability p1.
//
// With Z the waiting time until both segments hold usable entanglement, a
// connection attempt costs Z + 1 and the attempts are i.i.d., so
//
//   <T> = (<Z> + 1) / p1.
//
// With ideal memories Z = max{A, B} for independent geometric generation
// times A, B. With a memory lifetime tau a stored link is usable while its
// age is <= tau; if the partner segment has not succeeded by then the link is
// lost and both segments restart from vacuum.

#include <cstdint>

#include "muxrep/types.hpp"

namespace muxrep::analytics {

struct DoublingStats {
  double mean_Z = 0.0;
  double mean_T = 0.0;
  double rate = 0.0;
};

/// The three contributions to <Z>_tau.
struct WaitingTerms {
  double waiting = 0.0;    // (I) waiting for entanglement in either segment from vacuum
  double fruitless = 0.0;  // (II) attempts that end with the first link expiring
  double second = 0.0;     // (III) success in the other segment while the first is stored
  double total() const { return waiting + fruitless + second; }
};

/// <T> with ideal memory: (3 - p0^2) / (p0 p1 (2 - p0)).
double mean_time_infinite(Probability p0, Probability p1);

WaitingTerms mean_Z_terms(Probability p0, TimeUnits tau);
double mean_Z_finite(Probability p0, TimeUnits tau);

/// <T> with memory lifetime tau, evaluated from the closed form for <T>_tau
/// directly rather than via <Z>.
double mean_time_finite(Probability p0, Probability p1, TimeUnits tau);

DoublingStats doubling_stats(Probability p0, Probability p1, TimeUnits tau);

/// Small-p0 approximation of <Z>_tau,
///   1/(p0^2 (1+2 tau)) + 2 tau/(p0 (1+2 tau)) + 2 tau^2 (1-p0)/(1+2 tau).
double mean_Z_asymptotic(Probability p0, TimeUnits tau);

/// True when p0 < 1/(tau+1), the regime in which the approximation applies.
bool asymptotic_regime(Probability p0, TimeUnits tau);

struct MultiplexedRate {
  double rate = 0.0;
  double alpha = 1.0;  // 1 - alpha approximates the probability of residual entanglement
};

/// Approximate connection rate of an N = 1 multiplexed repeater with n
/// elements per site. For n = 1 this is exactly 1/<T>_tau.
MultiplexedRate multiplexed_rate(Probability p0, Probability p1, TimeUnits tau, int n);

/// Literal transcriptions of the printed closed forms, kept for cross-checking
/// the rearranged evaluations above. They lose precision for small p0.
namespace literal {
double mean_time_finite(double p0, double p1, std::int64_t tau);
MultiplexedRate multiplexed_rate(double p0, double p1, std::int64_t tau, int n);
}  // namespace literal

/// q^k with q = 1 - p, computed as exp(k log1p(-p)); 0 when q = 0 and k >= 1.
double q_pow(double p, double k);
/// 1 - q^k without cancellation for small p.
double one_minus_q_pow(double p, double k);

}  // namespace muxrep::analytics
