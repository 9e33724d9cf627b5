#pragma once

// Discrete-time Monte Carlo engine for 2^N-segment repeater chains.
//
// Geometry: nodes 0..2^N, segment s joins node s and node s+1. Each segment
// owns n element pairs; the element at its left end sits in node s, the one
// at its right end in node s+1. A level-k link spans the 2^k segments of
// block b (segments b*2^k .. (b+1)*2^k - 1) and occupies one element at each
// end of that span.
//
// One time unit proceeds in four phases:
//   1. stored links older than tau are discarded and their elements freed;
//   2. every free element pair attempts generation with probability P_0
//      (skipped for segments covered by an in-flight connection when
//      concurrent generation is off);
//   3. connection attempts whose latency has elapsed resolve: success stores
//      the joined link one level up (or records a terminal success at level
//      N), failure frees the outer elements;
//   4. bottom-up over levels, adjacent stored links are paired per policy and
//      connection attempts are launched. The inner elements are freed at
//      launch; the joined link keeps the older creation time.
// Elements freed in phases 3 and 4 attempt generation from the next unit on.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "muxrep/philox.hpp"
#include "muxrep/types.hpp"

namespace muxrep::sim {

enum class Side : int { Left = 0, Right = 1 };

struct Entanglement {
  TimeUnits created_at;
  int level = 0;
  bool in_flight = false;
};

struct MemoryElement {
  int address = 0;
  std::optional<Entanglement> entangled;  // empty: vacuum
};

struct StoredLink {
  std::int32_t left_address = 0;
  std::int32_t right_address = 0;
  std::int64_t created_at = 0;
};

class ChainState {
 public:
  ChainState(int levels, int elements);

  int levels() const { return levels_; }
  int elements() const { return elements_; }
  int segment_count() const { return segments_; }
  TimeUnits clock() const { return TimeUnits(clock_); }

  MemoryElement element(int segment, Side side, int address) const;
  /// Idle links at `level` in `block`, oldest first.
  const std::deque<StoredLink>& links(int level, int block) const;
  /// Connection attempts in flight whose output is a level-`level` link.
  std::size_t in_flight(int level) const;
  std::size_t free_pairs(int segment) const { return free_[static_cast<std::size_t>(segment)].size(); }

  /// Checks the structural invariants; returns a description of the first
  /// violation, if any.
  std::optional<std::string> check_invariants() const;

 private:
  friend class Simulation;

  struct Slot {
    std::int64_t created_at = 0;
    std::int16_t level = -1;  // -1: vacuum
    bool in_flight = false;
  };

  struct Pending {
    std::int64_t completes_at = 0;
    std::int32_t block = 0;
    StoredLink link;
  };

  std::size_t slot_index(int segment, Side side, int address) const {
    return (static_cast<std::size_t>(segment) * 2 + static_cast<std::size_t>(side)) * static_cast<std::size_t>(elements_) +
           static_cast<std::size_t>(address);
  }
  Slot& slot(int segment, Side side, int address) { return slots_[slot_index(segment, side, address)]; }
  const Slot& slot(int segment, Side side, int address) const { return slots_[slot_index(segment, side, address)]; }

  void occupy(int segment, Side side, int address, std::int64_t created_at, int level, bool in_flight);
  void release(int segment, Side side, int address);
  void mark(int segment, Side side, int address, std::int64_t created_at, int level, bool in_flight);

  int first_segment(int level, int block) const { return block << level; }
  int last_segment(int level, int block) const { return ((block + 1) << level) - 1; }

  int levels_;
  int elements_;
  int segments_;
  std::int64_t clock_ = 0;
  std::vector<Slot> slots_;
  std::vector<std::vector<std::int32_t>> free_;  // free element pairs per segment
  std::vector<std::int32_t> free_pos_;           // position in free_ or -1
  std::vector<std::vector<std::deque<StoredLink>>> pools_;  // [level][block]
  std::vector<std::deque<Pending>> pending_;                // [output level], FIFO by completion
  std::vector<std::int32_t> coverage_;                      // in-flight attempts spanning each segment
};

struct StepReport {
  int successes = 0;
  int projected_successes = 0;  // successes that also passed the final projection
};

class Simulation {
 public:
  Simulation(const RepeaterParams& params, std::uint64_t seed, std::uint64_t stream = 0);

  StepReport step();

  const ChainState& state() const { return state_; }
  const RepeaterParams& params() const { return params_; }
  TimeUnits clock() const { return state_.clock(); }

  /// [0]: time units in which at least one generation attempt was made;
  /// [k]: level-k connection attempts launched.
  const std::vector<std::uint64_t>& attempts_by_level() const { return attempts_; }
  std::uint64_t expiries() const { return expiries_; }

 private:
  void expire(std::int64_t now);
  void generate(std::int64_t now);
  StepReport resolve(std::int64_t now);
  void launch(std::int64_t now);
  void purge_expired(int level, int block, std::int64_t now);
  void start_connection(int level, int pair, const StoredLink& left, const StoredLink& right, std::int64_t now);
  void cover(int level, int block, int delta);

  RepeaterParams params_;
  ChainState state_;
  PhiloxEngine rng_;
  std::vector<std::uint64_t> attempts_;
  std::uint64_t expiries_ = 0;
  std::vector<std::int32_t> hits_;
  std::vector<std::int32_t> by_address_;
};

struct TrialResult {
  TimeUnits time_to_success;
  std::vector<std::uint64_t> attempts_by_level;
  std::uint64_t expiries = 0;
  std::optional<bool> final_projection_passed;
  bool truncated = false;  // max_time reached without success

  bool operator==(const TrialResult&) const = default;
};

struct TrialLimits {
  std::int64_t max_time = 1'000'000'000;
};

/// Simulates from the all-vacuum state until the first terminal success.
/// Deterministic in (params, seed, stream).
TrialResult run_trial(const RepeaterParams& params, std::uint64_t seed, const TrialLimits& limits = {},
                      std::uint64_t stream = 0);

/// Lower bound on time_to_success: one generation unit plus every level's
/// latency.
std::int64_t minimum_success_time(const RepeaterParams& params);

enum class EstimateMethod { IndependentTrials, BatchMeans };
std::string_view to_string(EstimateMethod m);

struct TrialBudget {
  std::uint64_t trials = 0;
};
struct HorizonBudget {
  std::int64_t horizon = 0;
  int batches = 30;
};
using Budget = std::variant<TrialBudget, HorizonBudget>;

struct EstimateOptions {
  int threads = 1;
  TrialLimits limits;
};

struct RateEstimate {
  double mean_rate = 0.0;  // successes per time unit
  double std_error = 0.0;
  std::uint64_t trials_or_horizon = 0;
  EstimateMethod method = EstimateMethod::IndependentTrials;

  std::uint64_t successes = 0;
  std::optional<double> projected_rate;  // rate of successes passing the final projection
  // IndependentTrials only.
  double mean_time = 0.0;
  double mean_time_std_error = 0.0;
  std::uint64_t generation_rounds = 0;
  std::uint64_t truncated = 0;
  bool no_successes = false;

  /// mean_rate +/- z * std_error
  double lower(double z = 3.0) const { return mean_rate - z * std_error; }
  double upper(double z = 3.0) const { return mean_rate + z * std_error; }
};

/// IndependentTrials: rate = 1/mean(time_to_success) with a delta-method
/// standard error; each trial uses stream i of `seed`, and sums are kept in
/// integers so the result does not depend on the thread count.
/// BatchMeans: one trajectory that keeps running after each success; the
/// horizon is split into equal batches and the error is the standard error of
/// the batch rates.
RateEstimate estimate_rate(const RepeaterParams& params, std::uint64_t seed, const Budget& budget,
                           const EstimateOptions& options = {});

}  // namespace muxrep::sim
