#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace muxrep {

/// Raised when a parameter set violates one of its invariants. The message
/// starts with the name of the violated invariant, e.g.
/// "probability out of range: p_gen = 1.2".
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by closed forms whose expected value is infinite (a zero success
/// probability somewhere in the chain).
class DivergentError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Discrete simulation time, measured in units of the light travel time over
/// one fundamental segment. Never negative.
class TimeUnits {
 public:
  constexpr TimeUnits() = default;
  constexpr explicit TimeUnits(std::int64_t value) : value_(value) {
    if (value < 0) throw ValidationError("negative time: " + std::to_string(value));
  }

  constexpr std::int64_t value() const { return value_; }

  friend constexpr auto operator<=>(TimeUnits, TimeUnits) = default;

  constexpr TimeUnits operator+(TimeUnits other) const { return TimeUnits(value_ + other.value_); }
  // Throws when other > *this.
  constexpr TimeUnits operator-(TimeUnits other) const { return TimeUnits(value_ - other.value_); }

 private:
  std::int64_t value_ = 0;
};

/// A real number in [0, 1]; checked on construction.
class Probability {
 public:
  constexpr Probability() = default;
  constexpr Probability(double value) : value_(value) {  // NOLINT: implicit by intent
    if (!(value >= 0.0 && value <= 1.0)) {
      throw ValidationError("probability out of range: " + std::to_string(value));
    }
  }

  constexpr double value() const { return value_; }
  constexpr double complement() const { return 1.0 - value_; }
  constexpr operator double() const { return value_; }  // NOLINT

 private:
  double value_ = 0.0;
};

enum class Architecture { Parallel, Multiplexed };

std::string_view to_string(Architecture a);
Architecture parse_architecture(std::string_view text);

struct RepeaterParams {
  int levels = 1;            // N: number of entanglement-length doublings
  int elements = 1;          // n: memory elements per site
  TimeUnits tau{0};          // memory lifetime
  double p_gen = 1.0;        // P_0
  std::vector<double> p_conn{1.0};            // P_1 .. P_N
  std::vector<std::int64_t> level_latency{1};  // classical-signal cost of each connection level
  Architecture architecture = Architecture::Parallel;
  std::optional<double> final_projection;     // epsilon, NPRD post-selection
  // When false, a fundamental segment makes no generation attempts while a
  // connection attempt spanning it is in flight.
  bool concurrent_generation = true;

  bool operator==(const RepeaterParams&) const = default;
};

/// Default per-level connection latency: 2^(k-1) units for level k.
std::vector<std::int64_t> default_level_latency(int levels);

/// Convenience constructor for N=1 chains.
RepeaterParams doubling_params(double p0, double p1, std::int64_t tau, int n = 1,
                               Architecture arch = Architecture::Parallel);

/// Returns params unchanged when every invariant holds, otherwise throws
/// ValidationError naming the first violated invariant.
const RepeaterParams& validate(const RepeaterParams& params);

/// An entangled element created at `created_at` is usable at `now` iff
/// now - created_at <= tau. Usability is inclusive so that tau = 0 still lets
/// two links created in the same time unit be joined.
constexpr bool is_expired(std::int64_t now, std::int64_t created_at, std::int64_t tau) {
  return now - created_at > tau;
}
constexpr bool is_expired(TimeUnits now, TimeUnits created_at, TimeUnits tau) {
  return is_expired(now.value(), created_at.value(), tau.value());
}

}  // namespace muxrep
