#include "muxrep/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace muxrep::oracle {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

std::vector<double> row_sums(const ChainSpec& chain) {
  std::vector<double> sums(chain.state_count, 0.0);
  for (const auto& t : chain.transitions) sums.at(t.from) += t.probability;
  return sums;
}

// P(k successes out of m) for k = 0..m.
std::vector<double> binomial_pmf(int m, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(m) + 1, 0.0);
  double coeff = 1.0;
  for (int k = 0; k <= m; ++k) {
    pmf[static_cast<std::size_t>(k)] = coeff * std::pow(p, k) * std::pow(1.0 - p, m - k);
    coeff = coeff * (m - k) / (k + 1);
  }
  return pmf;
}

// Builds a chain by breadth-first expansion from `start`. The expander maps a
// state to its outgoing (next state, probability, reward) triples.
template <typename State>
ChainSpec expand(const State& start, const std::function<std::vector<std::tuple<State, double, double>>(const State&)>& next,
                 const std::function<bool(const State&)>& is_absorbing, const std::function<std::string(const State&)>& label,
                 std::size_t max_states) {
  std::map<State, std::size_t> index;
  std::vector<State> order;
  index.emplace(start, 0);
  order.push_back(start);

  ChainSpec chain;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const State s = order[i];
    for (const auto& [to, prob, reward] : next(s)) {
      if (prob == 0.0) continue;
      auto [it, inserted] = index.emplace(to, order.size());
      if (inserted) {
        order.push_back(to);
        if (order.size() > max_states) {
          throw OracleTooLarge("oracle instance too large: more than " + std::to_string(max_states) + " states");
        }
      }
      chain.transitions.push_back({i, it->second, prob, reward});
    }
  }
  chain.state_count = order.size();
  chain.initial = 0;
  chain.absorbing.resize(order.size());
  chain.labels.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    chain.absorbing[i] = is_absorbing(order[i]);
    chain.labels.push_back(label(order[i]));
  }
  return chain;
}

}  // namespace

void check_stochastic(const ChainSpec& chain, double tolerance) {
  const auto sums = row_sums(chain);
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (std::abs(sums[i] - 1.0) > tolerance) {
      std::ostringstream os;
      os << "row " << i << " sums to " << sums[i];
      throw std::logic_error(os.str());
    }
  }
  for (std::size_t i = 0; i < chain.absorbing.size(); ++i) {
    if (!chain.absorbing[i]) continue;
    double self = 0.0;
    for (const auto& t : chain.transitions) {
      if (t.from == i && t.to == i) self += t.probability;
    }
    if (std::abs(self - 1.0) > tolerance) throw std::logic_error("absorbing state " + std::to_string(i) + " leaks");
  }
}

std::vector<double> expected_hitting_times(const ChainSpec& chain) {
  // Transient states only: (I - Q) t = 1.
  std::vector<std::ptrdiff_t> slot(chain.state_count, -1);
  std::ptrdiff_t transient = 0;
  for (std::size_t i = 0; i < chain.state_count; ++i) {
    if (chain.absorbing.empty() || !chain.absorbing[i]) slot[i] = transient++;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::ptrdiff_t i = 0; i < transient; ++i) triplets.emplace_back(i, i, 1.0);
  for (const auto& t : chain.transitions) {
    if (slot[t.from] < 0 || slot[t.to] < 0) continue;
    triplets.emplace_back(slot[t.from], slot[t.to], -t.probability);
  }
  SparseMatrix a(transient, transient);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("hitting-time system is singular");
  const Eigen::VectorXd times = lu.solve(Eigen::VectorXd::Ones(transient));

  std::vector<double> out(chain.state_count, 0.0);
  for (std::size_t i = 0; i < chain.state_count; ++i) {
    if (slot[i] >= 0) out[i] = times[slot[i]];
  }
  return out;
}

std::vector<double> stationary_distribution(const ChainSpec& chain) {
  // pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
  const auto n = static_cast<std::ptrdiff_t>(chain.state_count);
  const std::ptrdiff_t last = n - 1;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::ptrdiff_t i = 0; i < last; ++i) triplets.emplace_back(i, i, -1.0);
  for (const auto& t : chain.transitions) {
    const auto row = static_cast<std::ptrdiff_t>(t.to);
    if (row == last) continue;
    triplets.emplace_back(row, static_cast<std::ptrdiff_t>(t.from), t.probability);
  }
  for (std::ptrdiff_t j = 0; j < n; ++j) triplets.emplace_back(last, j, 1.0);
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("stationary system is singular");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[last] = 1.0;
  const Eigen::VectorXd pi = lu.solve(rhs);
  return {pi.data(), pi.data() + n};
}

double stationary_reward_rate(const ChainSpec& chain) {
  const auto pi = stationary_distribution(chain);
  double rate = 0.0;
  for (const auto& t : chain.transitions) rate += pi[t.from] * t.probability * t.reward;
  return rate;
}

// ---------------------------------------------------------------------------
// Single-element doubling.

namespace {

constexpr int kNone = -1;

struct DoublingState {
  enum class Phase { Generating, InFlight, Done } phase = Phase::Generating;
  int left = kNone;   // age of the stored link at the end of the last step
  int right = kNone;
  auto operator<=>(const DoublingState&) const = default;
};

}  // namespace

ChainSpec doubling_chain(Probability p0, Probability p1, TimeUnits tau, const Limits& limits) {
  if (tau.value() > limits.max_tau) {
    throw OracleTooLarge("oracle instance too large: tau = " + std::to_string(tau.value()) + " exceeds " +
                         std::to_string(limits.max_tau));
  }
  const int t = static_cast<int>(tau.value());
  const double p = p0;
  const double q = p0.complement();
  using Phase = DoublingState::Phase;
  using Out = std::vector<std::tuple<DoublingState, double, double>>;

  auto next = [=](const DoublingState& s) -> Out {
    if (s.phase == Phase::Done) return {{s, 1.0, 0.0}};
    if (s.phase == Phase::InFlight) return {{DoublingState{Phase::Done}, p1.value(), 1.0}, {DoublingState{}, p1.complement(), 0.0}};
    // Age the stored link; it is lost once its age exceeds tau.
    auto age = [t](int a) { return (a == kNone || a + 1 > t) ? kNone : a + 1; };
    const int l = age(s.left);
    const int r = age(s.right);
    // Each vacuum segment attempts generation.
    std::vector<std::pair<int, double>> lo = l == kNone ? std::vector<std::pair<int, double>>{{0, p}, {kNone, q}}
                                                        : std::vector<std::pair<int, double>>{{l, 1.0}};
    std::vector<std::pair<int, double>> ro = r == kNone ? std::vector<std::pair<int, double>>{{0, p}, {kNone, q}}
                                                        : std::vector<std::pair<int, double>>{{r, 1.0}};
    Out out;
    for (const auto& [la, lp] : lo) {
      for (const auto& [ra, rp] : ro) {
        if (la != kNone && ra != kNone) {
          out.emplace_back(DoublingState{Phase::InFlight}, lp * rp, 0.0);
        } else {
          out.emplace_back(DoublingState{Phase::Generating, la, ra}, lp * rp, 0.0);
        }
      }
    }
    return out;
  };
  auto absorbing = [](const DoublingState& s) { return s.phase == Phase::Done; };
  auto label = [](const DoublingState& s) {
    switch (s.phase) {
      case Phase::Done: return std::string("done");
      case Phase::InFlight: return std::string("in-flight");
      default: break;
    }
    auto f = [](int a) { return a == kNone ? std::string("-") : std::to_string(a); };
    return "(" + f(s.left) + "," + f(s.right) + ")";
  };
  auto chain = expand<DoublingState>(DoublingState{}, next, absorbing, label, limits.max_states);
  check_stochastic(chain);
  return chain;
}

double exact_mean_time_doubling(Probability p0, Probability p1, TimeUnits tau, const Limits& limits) {
  if (!(p0.value() > 0.0) || !(p1.value() > 0.0)) throw DivergentError("divergent mean time");
  const auto chain = doubling_chain(p0, p1, tau, limits);
  return expected_hitting_times(chain)[chain.initial];
}

// ---------------------------------------------------------------------------
// Multiplexed N = 1.

namespace {

struct MuxState {
  int residual_side = 0;   // 0 left, 1 right; irrelevant when ages is empty
  std::vector<int> ages;   // stored links on the residual side, oldest first
  int in_flight = 0;
  auto operator<=>(const MuxState&) const = default;
};

}  // namespace

ChainSpec multiplexed_chain(Probability p0, Probability p1, TimeUnits tau, int n, bool concurrent_generation,
                            const Limits& limits) {
  if (n < 1) throw ValidationError("elements must be positive");
  if (n > limits.max_elements || tau.value() > limits.max_tau_multiplexed) {
    throw OracleTooLarge("oracle instance too large: n = " + std::to_string(n) + ", tau = " +
                         std::to_string(tau.value()));
  }
  const int t = static_cast<int>(tau.value());
  using Out = std::vector<std::tuple<MuxState, double, double>>;

  // Generation pmfs indexed by number of free elements.
  std::vector<std::vector<double>> gen;
  for (int f = 0; f <= n; ++f) gen.push_back(binomial_pmf(f, p0));

  auto next = [=](const MuxState& s) -> Out {
    std::vector<int> stored[2];
    for (int a : s.ages) {
      if (a + 1 <= t) stored[s.residual_side].push_back(a + 1);
    }
    const bool generate = concurrent_generation || s.in_flight == 0;
    const int free_left = n - static_cast<int>(stored[0].size()) - s.in_flight;
    const int free_right = n - static_cast<int>(stored[1].size()) - s.in_flight;
    const std::vector<double> none{1.0};
    const auto& gl = generate ? gen[static_cast<std::size_t>(free_left)] : none;
    const auto& gr = generate ? gen[static_cast<std::size_t>(free_right)] : none;
    const double reward = s.in_flight * p1.value();

    Out out;
    for (std::size_t a = 0; a < gl.size(); ++a) {
      for (std::size_t b = 0; b < gr.size(); ++b) {
        std::vector<int> left = stored[0];
        std::vector<int> right = stored[1];
        left.insert(left.end(), a, 0);
        right.insert(right.end(), b, 0);
        // Ages are appended youngest-last, so both lists are oldest-first.
        const std::size_t matched = std::min(left.size(), right.size());
        MuxState ns;
        ns.in_flight = static_cast<int>(matched);
        if (left.size() > matched) {
          ns.residual_side = 0;
          ns.ages.assign(left.begin() + static_cast<std::ptrdiff_t>(matched), left.end());
        } else if (right.size() > matched) {
          ns.residual_side = 1;
          ns.ages.assign(right.begin() + static_cast<std::ptrdiff_t>(matched), right.end());
        }
        out.emplace_back(std::move(ns), gl[a] * gr[b], reward);
      }
    }
    return out;
  };
  auto absorbing = [](const MuxState&) { return false; };
  auto label = [](const MuxState& s) {
    std::string out = s.residual_side == 0 ? "L[" : "R[";
    for (std::size_t i = 0; i < s.ages.size(); ++i) out += (i ? "," : "") + std::to_string(s.ages[i]);
    return out + "] flight=" + std::to_string(s.in_flight);
  };
  auto chain = expand<MuxState>(MuxState{}, next, absorbing, label, limits.max_states);
  chain.absorbing.clear();
  check_stochastic(chain);
  return chain;
}

double exact_rate_multiplexed(Probability p0, Probability p1, TimeUnits tau, int n, bool concurrent_generation,
                              const Limits& limits) {
  const auto chain = multiplexed_chain(p0, p1, tau, n, concurrent_generation, limits);
  return stationary_reward_rate(chain);
}

}  // namespace muxrep::oracle
