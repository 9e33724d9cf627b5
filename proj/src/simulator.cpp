#include "muxrep/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace muxrep::sim {

// ---------------------------------------------------------------------------
// ChainState

ChainState::ChainState(int levels, int elements)
    : levels_(levels), elements_(elements), segments_(1 << levels) {
  const auto n = static_cast<std::size_t>(elements);
  const auto segs = static_cast<std::size_t>(segments_);
  slots_.resize(segs * 2 * n);
  free_.resize(segs);
  free_pos_.resize(segs * n);
  for (std::size_t s = 0; s < segs; ++s) {
    free_[s].resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      free_[s][a] = static_cast<std::int32_t>(a);
      free_pos_[s * n + a] = static_cast<std::int32_t>(a);
    }
  }
  pools_.resize(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) pools_[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(segments_ >> k));
  pending_.resize(static_cast<std::size_t>(levels) + 1);
  coverage_.assign(segs, 0);
}

MemoryElement ChainState::element(int segment, Side side, int address) const {
  MemoryElement e;
  e.address = address;
  const Slot& s = slot(segment, side, address);
  if (s.level >= 0) e.entangled = Entanglement{TimeUnits(s.created_at), s.level, s.in_flight};
  return e;
}

const std::deque<StoredLink>& ChainState::links(int level, int block) const {
  return pools_.at(static_cast<std::size_t>(level)).at(static_cast<std::size_t>(block));
}

std::size_t ChainState::in_flight(int level) const { return pending_.at(static_cast<std::size_t>(level)).size(); }

void ChainState::occupy(int segment, Side side, int address, std::int64_t created_at, int level, bool in_flight) {
  Slot& s = slot(segment, side, address);
  const Side other = side == Side::Left ? Side::Right : Side::Left;
  if (s.level < 0 && slot(segment, other, address).level < 0) {
    // The pair leaves the free list.
    auto& list = free_[static_cast<std::size_t>(segment)];
    const std::size_t key = static_cast<std::size_t>(segment) * static_cast<std::size_t>(elements_) +
                            static_cast<std::size_t>(address);
    const auto pos = static_cast<std::size_t>(free_pos_[key]);
    const std::int32_t moved = list.back();
    list[pos] = moved;
    free_pos_[static_cast<std::size_t>(segment) * static_cast<std::size_t>(elements_) + static_cast<std::size_t>(moved)] =
        static_cast<std::int32_t>(pos);
    list.pop_back();
    free_pos_[key] = -1;
  }
  mark(segment, side, address, created_at, level, in_flight);
}

void ChainState::mark(int segment, Side side, int address, std::int64_t created_at, int level, bool in_flight) {
  Slot& s = slot(segment, side, address);
  s.created_at = created_at;
  s.level = static_cast<std::int16_t>(level);
  s.in_flight = in_flight;
}

void ChainState::release(int segment, Side side, int address) {
  Slot& s = slot(segment, side, address);
  s = Slot{};
  const Side other = side == Side::Left ? Side::Right : Side::Left;
  if (slot(segment, other, address).level < 0) {
    auto& list = free_[static_cast<std::size_t>(segment)];
    free_pos_[static_cast<std::size_t>(segment) * static_cast<std::size_t>(elements_) + static_cast<std::size_t>(address)] =
        static_cast<std::int32_t>(list.size());
    list.push_back(address);
  }
}

std::optional<std::string> ChainState::check_invariants() const {
  std::ostringstream err;
  const int n = elements_;
  std::vector<int> expected(slots_.size(), 0);

  auto claim = [&](int segment, Side side, int address, int level, std::int64_t created, bool in_flight) -> bool {
    if (address < 0 || address >= n) {
      err << "address " << address << " out of range";
      return false;
    }
    const std::size_t i = slot_index(segment, side, address);
    if (++expected[i] > 1) {
      err << "element (" << segment << "," << static_cast<int>(side) << "," << address << ") held by two links";
      return false;
    }
    const Slot& s = slots_[i];
    if (s.level != level || s.created_at != created || s.in_flight != in_flight) {
      err << "element (" << segment << "," << static_cast<int>(side) << "," << address << ") state mismatch";
      return false;
    }
    return true;
  };

  for (int k = 0; k < levels_; ++k) {
    const int blocks = segments_ >> k;
    for (int b = 0; b < blocks; ++b) {
      const auto& pool = pools_[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)];
      std::size_t live = pool.size();
      for (const auto& p : pending_[static_cast<std::size_t>(k)]) live += (p.block == b);
      if (live > static_cast<std::size_t>(n)) {
        err << "level " << k << " block " << b << " holds " << live << " links for " << n << " elements";
        return err.str();
      }
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& link = pool[i];
        if (i > 0 && pool[i - 1].created_at > link.created_at) {
          err << "pool level " << k << " block " << b << " not ordered by age";
          return err.str();
        }
        if (!claim(first_segment(k, b), Side::Left, link.left_address, k, link.created_at, false) ||
            !claim(last_segment(k, b), Side::Right, link.right_address, k, link.created_at, false)) {
          return err.str();
        }
      }
    }
  }
  for (int k = 1; k <= levels_; ++k) {
    for (const auto& p : pending_[static_cast<std::size_t>(k)]) {
      if (!claim(first_segment(k, p.block), Side::Left, p.link.left_address, k, p.link.created_at, true) ||
          !claim(last_segment(k, p.block), Side::Right, p.link.right_address, k, p.link.created_at, true)) {
        return err.str();
      }
    }
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (expected[i] == 0 && slots_[i].level >= 0) {
      err << "element slot " << i << " entangled without a link";
      return err.str();
    }
  }
  for (int s = 0; s < segments_; ++s) {
    std::size_t vacant = 0;
    for (int a = 0; a < n; ++a) {
      const bool pair_free = slot(s, Side::Left, a).level < 0 && slot(s, Side::Right, a).level < 0;
      vacant += pair_free;
      const auto pos = free_pos_[static_cast<std::size_t>(s) * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)];
      if (pair_free != (pos >= 0)) {
        err << "free list of segment " << s << " out of sync at address " << a;
        return err.str();
      }
    }
    if (vacant != free_[static_cast<std::size_t>(s)].size()) {
      err << "free list of segment " << s << " has wrong size";
      return err.str();
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(const RepeaterParams& params, std::uint64_t seed, std::uint64_t stream)
    : params_(validate(params)),
      state_(params.levels, params.elements),
      rng_(seed, stream),
      attempts_(static_cast<std::size_t>(params.levels) + 1, 0),
      by_address_(static_cast<std::size_t>(params.elements), -1) {}

StepReport Simulation::step() {
  const std::int64_t now = ++state_.clock_;
  expire(now);
  generate(now);
  StepReport report = resolve(now);
  launch(now);
  return report;
}

void Simulation::expire(std::int64_t now) {
  const std::int64_t tau = params_.tau.value();
  for (int k = 0; k < state_.levels_; ++k) {
    auto& blocks = state_.pools_[static_cast<std::size_t>(k)];
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (!blocks[b].empty() && is_expired(now, blocks[b].front().created_at, tau)) {
        purge_expired(k, static_cast<int>(b), now);
      }
    }
  }
}

void Simulation::purge_expired(int level, int block, std::int64_t now) {
  auto& pool = state_.pools_[static_cast<std::size_t>(level)][static_cast<std::size_t>(block)];
  const std::int64_t tau = params_.tau.value();
  while (!pool.empty() && is_expired(now, pool.front().created_at, tau)) {
    const StoredLink link = pool.front();
    pool.pop_front();
    state_.release(state_.first_segment(level, block), Side::Left, link.left_address);
    state_.release(state_.last_segment(level, block), Side::Right, link.right_address);
    ++expiries_;
  }
}

void Simulation::generate(std::int64_t now) {
  const double p = params_.p_gen;
  bool attempted = false;
  for (int s = 0; s < state_.segments_; ++s) {
    const auto& list = state_.free_[static_cast<std::size_t>(s)];
    if (list.empty()) continue;
    if (!params_.concurrent_generation && state_.coverage_[static_cast<std::size_t>(s)] > 0) continue;
    attempted = true;
    if (p <= 0.0) continue;
    // Successful positions among the free pairs, by geometric skipping.
    hits_.clear();
    const std::uint64_t size = list.size();
    std::uint64_t idx = rng_.geometric_failures(p);
    while (idx < size) {
      hits_.push_back(list[static_cast<std::size_t>(idx)]);
      const std::uint64_t skip = rng_.geometric_failures(p);
      if (skip >= size) break;
      idx += 1 + skip;
    }
    auto& pool = state_.pools_[0][static_cast<std::size_t>(s)];
    for (const std::int32_t a : hits_) {
      state_.occupy(s, Side::Left, a, now, 0, false);
      state_.occupy(s, Side::Right, a, now, 0, false);
      pool.push_back(StoredLink{a, a, now});
    }
  }
  if (attempted) ++attempts_[0];
}

StepReport Simulation::resolve(std::int64_t now) {
  StepReport report;
  const int top = state_.levels_;
  for (int k = 1; k <= top; ++k) {
    auto& queue = state_.pending_[static_cast<std::size_t>(k)];
    while (!queue.empty() && queue.front().completes_at <= now) {
      const ChainState::Pending p = queue.front();
      queue.pop_front();
      if (!params_.concurrent_generation) cover(k, p.block, -1);
      const int first = state_.first_segment(k, p.block);
      const int last = state_.last_segment(k, p.block);
      const bool ok = rng_.bernoulli(params_.p_conn[static_cast<std::size_t>(k - 1)]);
      if (ok && k == top) {
        state_.release(first, Side::Left, p.link.left_address);
        state_.release(last, Side::Right, p.link.right_address);
        ++report.successes;
        if (!params_.final_projection || rng_.bernoulli(*params_.final_projection)) ++report.projected_successes;
      } else if (ok) {
        state_.mark(first, Side::Left, p.link.left_address, p.link.created_at, k, false);
        state_.mark(last, Side::Right, p.link.right_address, p.link.created_at, k, false);
        auto& pool = state_.pools_[static_cast<std::size_t>(k)][static_cast<std::size_t>(p.block)];
        auto pos = std::upper_bound(pool.begin(), pool.end(), p.link.created_at,
                                    [](std::int64_t c, const StoredLink& l) { return c < l.created_at; });
        pool.insert(pos, p.link);
      } else {
        state_.release(first, Side::Left, p.link.left_address);
        state_.release(last, Side::Right, p.link.right_address);
      }
    }
  }
  return report;
}

void Simulation::cover(int level, int block, int delta) {
  const int first = state_.first_segment(level, block);
  const int last = state_.last_segment(level, block);
  for (int s = first; s <= last; ++s) state_.coverage_[static_cast<std::size_t>(s)] += delta;
}

void Simulation::start_connection(int level, int pair, const StoredLink& left, const StoredLink& right,
                                  std::int64_t now) {
  const int out_level = level + 1;
  // Inner elements are measured and freed.
  state_.release(state_.last_segment(level, 2 * pair), Side::Right, left.right_address);
  state_.release(state_.first_segment(level, 2 * pair + 1), Side::Left, right.left_address);
  const StoredLink joined{left.left_address, right.right_address, std::min(left.created_at, right.created_at)};
  state_.mark(state_.first_segment(out_level, pair), Side::Left, joined.left_address, joined.created_at, out_level, true);
  state_.mark(state_.last_segment(out_level, pair), Side::Right, joined.right_address, joined.created_at, out_level, true);
  state_.pending_[static_cast<std::size_t>(out_level)].push_back(
      ChainState::Pending{now + params_.level_latency[static_cast<std::size_t>(level)], pair, joined});
  ++attempts_[static_cast<std::size_t>(out_level)];
  if (!params_.concurrent_generation) cover(out_level, pair, +1);
}

void Simulation::launch(std::int64_t now) {
  const bool multiplexed = params_.architecture == Architecture::Multiplexed;
  for (int k = 0; k < state_.levels_; ++k) {
    auto& blocks = state_.pools_[static_cast<std::size_t>(k)];
    const int pairs = static_cast<int>(blocks.size()) / 2;
    for (int j = 0; j < pairs; ++j) {
      auto& left = blocks[static_cast<std::size_t>(2 * j)];
      auto& right = blocks[static_cast<std::size_t>(2 * j + 1)];
      // Links that arrived from a connection already past their lifetime.
      purge_expired(k, 2 * j, now);
      purge_expired(k, 2 * j + 1, now);
      if (left.empty() || right.empty()) continue;

      if (multiplexed) {
        // Oldest-first pairing.
        while (!left.empty() && !right.empty()) {
          const StoredLink l = left.front();
          const StoredLink r = right.front();
          left.pop_front();
          right.pop_front();
          start_connection(k, j, l, r, now);
        }
        continue;
      }

      // Parallel: only links meeting at the same element address.
      for (std::size_t i = 0; i < right.size(); ++i) {
        by_address_[static_cast<std::size_t>(right[i].left_address)] = static_cast<std::int32_t>(i);
      }
      std::vector<std::pair<std::size_t, std::size_t>> matches;
      for (std::size_t i = 0; i < left.size(); ++i) {
        const auto r = by_address_[static_cast<std::size_t>(left[i].right_address)];
        if (r >= 0) matches.emplace_back(i, static_cast<std::size_t>(r));
      }
      for (const auto& link : right) by_address_[static_cast<std::size_t>(link.left_address)] = -1;
      if (matches.empty()) continue;

      std::vector<bool> used_left(left.size(), false);
      std::vector<bool> used_right(right.size(), false);
      for (const auto& [li, ri] : matches) {
        used_left[li] = true;
        used_right[ri] = true;
        start_connection(k, j, left[li], right[ri], now);
      }
      auto compact = [](std::deque<StoredLink>& pool, const std::vector<bool>& used) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (!used[i]) pool[out++] = pool[i];
        }
        pool.resize(out);
      };
      compact(left, used_left);
      compact(right, used_right);
    }
  }
}

// ---------------------------------------------------------------------------
// Trials and estimates

std::int64_t minimum_success_time(const RepeaterParams& params) {
  std::int64_t t = 1;
  for (auto l : params.level_latency) t += l;
  return t;
}

TrialResult run_trial(const RepeaterParams& params, std::uint64_t seed, const TrialLimits& limits,
                      std::uint64_t stream) {
  Simulation sim(params, seed, stream);
  TrialResult result;
  while (true) {
    if (sim.clock().value() >= limits.max_time) {
      result.truncated = true;
      break;
    }
    const StepReport r = sim.step();
    if (r.successes > 0) {
      if (params.final_projection) result.final_projection_passed = r.projected_successes > 0;
      break;
    }
  }
  result.time_to_success = sim.clock();
  result.attempts_by_level = sim.attempts_by_level();
  result.expiries = sim.expiries();
  return result;
}

std::string_view to_string(EstimateMethod m) {
  return m == EstimateMethod::IndependentTrials ? "IndependentTrials" : "BatchMeans";
}

namespace {

struct TrialSums {
  std::uint64_t completed = 0;
  std::uint64_t truncated = 0;
  std::uint64_t passed = 0;
  std::uint64_t rounds = 0;
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;

  void add(const TrialSums& o) {
    completed += o.completed;
    truncated += o.truncated;
    passed += o.passed;
    rounds += o.rounds;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

TrialSums run_range(const RepeaterParams& params, std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                    const TrialLimits& limits) {
  TrialSums s;
  for (std::uint64_t i = begin; i < end; ++i) {
    const TrialResult r = run_trial(params, seed, limits, i);
    s.rounds += r.attempts_by_level[0];
    if (r.truncated) {
      ++s.truncated;
      continue;
    }
    const auto t = static_cast<std::uint64_t>(r.time_to_success.value());
    ++s.completed;
    s.sum += t;
    s.sum_sq += static_cast<unsigned __int128>(t) * t;
    if (r.final_projection_passed.value_or(true)) ++s.passed;
  }
  return s;
}

RateEstimate independent_trials(const RepeaterParams& params, std::uint64_t seed, std::uint64_t trials,
                                const EstimateOptions& options) {
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(std::max<std::uint64_t>(trials, 1))));
  std::vector<TrialSums> parts(static_cast<std::size_t>(threads));
  if (threads == 1) {
    parts[0] = run_range(params, seed, 0, trials, options.limits);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t begin = trials * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(threads);
      const std::uint64_t end = trials * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(threads);
      pool.emplace_back([&, t, begin, end] { parts[static_cast<std::size_t>(t)] = run_range(params, seed, begin, end, options.limits); });
    }
    for (auto& th : pool) th.join();
  }
  TrialSums total;
  for (const auto& p : parts) total.add(p);

  RateEstimate est;
  est.method = EstimateMethod::IndependentTrials;
  est.trials_or_horizon = trials;
  est.successes = total.completed;
  est.truncated = total.truncated;
  est.generation_rounds = total.rounds;
  if (total.completed == 0) {
    est.no_successes = true;
    return est;
  }
  const double k = static_cast<double>(total.completed);
  const double mean = static_cast<double>(total.sum) / k;
  // Integer sums keep the variance exact up to the final division.
  const unsigned __int128 centered = total.sum_sq * total.completed - total.sum * total.sum;
  const double var = total.completed > 1 ? static_cast<double>(centered) / (k * (k - 1.0)) : 0.0;
  est.mean_time = mean;
  est.mean_time_std_error = std::sqrt(var / k);
  est.mean_rate = 1.0 / mean;
  est.std_error = est.mean_time_std_error / (mean * mean);
  if (params.final_projection) est.projected_rate = est.mean_rate * static_cast<double>(total.passed) / k;
  return est;
}

RateEstimate batch_means(const RepeaterParams& params, std::uint64_t seed, const HorizonBudget& budget) {
  if (budget.batches < 2) throw ValidationError("batch means needs at least 2 batches");
  if (budget.horizon < budget.batches) throw ValidationError("horizon shorter than the batch count");
  const std::int64_t length = budget.horizon / budget.batches;
  Simulation sim(params, seed, 0);
  std::vector<double> rates;
  std::vector<double> projected;
  std::uint64_t total = 0;
  std::uint64_t total_projected = 0;
  for (int b = 0; b < budget.batches; ++b) {
    std::uint64_t count = 0;
    std::uint64_t passed = 0;
    for (std::int64_t i = 0; i < length; ++i) {
      const StepReport r = sim.step();
      count += static_cast<std::uint64_t>(r.successes);
      passed += static_cast<std::uint64_t>(r.projected_successes);
    }
    total += count;
    total_projected += passed;
    rates.push_back(static_cast<double>(count) / static_cast<double>(length));
    projected.push_back(static_cast<double>(passed) / static_cast<double>(length));
  }
  const auto steps = static_cast<std::uint64_t>(length * budget.batches);

  RateEstimate est;
  est.method = EstimateMethod::BatchMeans;
  est.trials_or_horizon = steps;
  est.successes = total;
  est.generation_rounds = sim.attempts_by_level()[0];
  est.no_successes = total == 0;
  est.mean_rate = static_cast<double>(total) / static_cast<double>(steps);
  double ss = 0.0;
  for (double r : rates) ss += (r - est.mean_rate) * (r - est.mean_rate);
  const double b = static_cast<double>(budget.batches);
  est.std_error = std::sqrt(ss / (b - 1.0) / b);
  if (params.final_projection) est.projected_rate = static_cast<double>(total_projected) / static_cast<double>(steps);
  if (total > 0) est.mean_time = 1.0 / est.mean_rate;
  return est;
}

}  // namespace

RateEstimate estimate_rate(const RepeaterParams& params, std::uint64_t seed, const Budget& budget,
                           const EstimateOptions& options) {
  validate(params);
  if (const auto* t = std::get_if<TrialBudget>(&budget)) {
    if (t->trials == 0) throw ValidationError("trial budget must be positive");
    return independent_trials(params, seed, t->trials, options);
  }
  return batch_means(params, seed, std::get<HorizonBudget>(budget));
}

}  // namespace muxrep::sim
