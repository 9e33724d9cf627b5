#pragma once

// Exact expected times and long-run rates for small N = 1 instances, obtained
// by building the finite Markov chain of the doubling process and solving it
// directly. Used to validate both the closed forms and the simulator.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "muxrep/types.hpp"

namespace muxrep::oracle {

class OracleTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Transition {
  std::size_t from = 0;
  std::size_t to = 0;
  double probability = 0.0;
  double reward = 0.0;  // successes credited when this transition is taken
};

struct ChainSpec {
  std::size_t state_count = 0;
  std::vector<Transition> transitions;
  std::vector<bool> absorbing;         // empty for rate problems
  std::vector<std::string> labels;     // for diagnostics
  std::size_t initial = 0;
};

/// Throws std::logic_error if a row does not sum to 1 within `tolerance` or an
/// absorbing state does not self-loop with probability 1.
void check_stochastic(const ChainSpec& chain, double tolerance = 1e-12);

/// Expected number of transitions until absorption, from every state
/// (0 for absorbing states).
std::vector<double> expected_hitting_times(const ChainSpec& chain);

/// Stationary distribution of an irreducible chain.
std::vector<double> stationary_distribution(const ChainSpec& chain);

/// Long-run expected reward per transition under the stationary distribution.
double stationary_reward_rate(const ChainSpec& chain);

struct Limits {
  std::int64_t max_tau = 64;
  int max_elements = 3;
  std::int64_t max_tau_multiplexed = 8;
  std::size_t max_states = 200000;
};

/// The single-element doubling process. States are (left age, right age) with
/// ages in {none, 0..tau}, plus one connection-in-flight state and the
/// absorbing success state. A failed connection resets both segments; no
/// generation happens while the connection is in flight.
ChainSpec doubling_chain(Probability p0, Probability p1, TimeUnits tau, const Limits& limits = {});

double exact_mean_time_doubling(Probability p0, Probability p1, TimeUnits tau, const Limits& limits = {});

/// The N = 1 multiplexed process with n elements per site, run forever with
/// residual entanglement preserved. States are (multiset of stored-link ages
/// on the side holding residual links, number of connections in flight).
/// Connections pair stored links oldest-first. With concurrent_generation
/// false, no generation happens while a connection is in flight.
ChainSpec multiplexed_chain(Probability p0, Probability p1, TimeUnits tau, int n, bool concurrent_generation,
                            const Limits& limits = {});

/// Successes per time unit in steady state.
double exact_rate_multiplexed(Probability p0, Probability p1, TimeUnits tau, int n,
                              bool concurrent_generation = false, const Limits& limits = {});

}  // namespace muxrep::oracle
