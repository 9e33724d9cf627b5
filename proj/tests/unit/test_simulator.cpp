#include <gtest/gtest.h>

#include <random>

#include "muxrep/analytics.hpp"
#include "muxrep/simulator.hpp"

using namespace muxrep;
using namespace muxrep::sim;

namespace {

RepeaterParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RepeaterParams p;
  p.levels = 1 + static_cast<int>(rng() % 3);
  p.elements = 1 + static_cast<int>(rng() % 6);
  p.tau = TimeUnits(static_cast<std::int64_t>(rng() % 12));
  p.p_gen = u(rng);
  p.p_conn.clear();
  for (int k = 0; k < p.levels; ++k) p.p_conn.push_back(u(rng));
  p.level_latency = default_level_latency(p.levels);
  if (rng() % 2) p.level_latency.back() += static_cast<std::int64_t>(rng() % 3);
  p.architecture = rng() % 2 ? Architecture::Parallel : Architecture::Multiplexed;
  p.concurrent_generation = rng() % 2;
  if (rng() % 2) p.final_projection = u(rng);
  return p;
}

// Random chains can have astronomically long waiting times.
const TrialLimits kShort{200000};

}  // namespace

TEST(Simulator, InvariantsHoldOnRandomTrajectories) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto params = random_params(rng);
    Simulation sim(params, rng());
    for (int t = 0; t < 400; ++t) {
      const auto report = sim.step();
      ASSERT_GE(report.successes, report.projected_successes);
      const auto err = sim.state().check_invariants();
      ASSERT_FALSE(err.has_value()) << *err;
      const auto now = sim.clock().value();
      for (int k = 0; k < params.levels; ++k) {
        for (int b = 0; b < (1 << (params.levels - k)); ++b) {
          for (const auto& link : sim.state().links(k, b)) {
            ASSERT_FALSE(is_expired(now, link.created_at, params.tau.value()));
            ASSERT_LE(link.created_at, now);
          }
        }
      }
    }
  }
}

TEST(Simulator, ElementViewMatchesStoredLinks) {
  auto params = doubling_params(0.6, 0.5, 5, 3, Architecture::Multiplexed);
  Simulation sim(params, 5);
  for (int t = 0; t < 50; ++t) sim.step();
  int stored = 0;
  for (const auto& link : sim.state().links(0, 0)) {
    const auto e = sim.state().element(0, Side::Left, link.left_address);
    ASSERT_TRUE(e.entangled.has_value());
    EXPECT_EQ(e.entangled->created_at.value(), link.created_at);
    EXPECT_FALSE(e.entangled->in_flight);
    ++stored;
  }
  EXPECT_LE(stored, 3);
}

TEST(Simulator, RunTrialIsDeterministic) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    const auto params = random_params(rng);
    const auto seed = rng();
    const auto a = run_trial(params, seed, kShort);
    const auto b = run_trial(params, seed, kShort);
    EXPECT_EQ(a, b);
  }
}

TEST(Simulator, CertainEventsTakeMinimumTime) {
  for (int levels : {1, 2, 3}) {
    for (auto arch : {Architecture::Parallel, Architecture::Multiplexed}) {
      RepeaterParams p;
      p.levels = levels;
      p.elements = 2;
      p.tau = TimeUnits(100);
      p.p_gen = 1.0;
      p.p_conn.assign(static_cast<std::size_t>(levels), 1.0);
      p.level_latency = default_level_latency(levels);
      p.architecture = arch;
      const auto r = run_trial(p, 1);
      EXPECT_EQ(r.time_to_success.value(), minimum_success_time(p));
      EXPECT_EQ(minimum_success_time(p), 1 + (1 << levels) - 1);
    }
  }
  EXPECT_EQ(minimum_success_time(doubling_params(0.1, 0.1, 0)), 2);
}

TEST(Simulator, TrialsNeverBeatMinimumTime) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto params = random_params(rng);
    const auto r = run_trial(params, rng(), kShort);
    EXPECT_GE(r.time_to_success.value(), minimum_success_time(params));
    if (!r.truncated) {
      EXPECT_EQ(r.final_projection_passed.has_value(), params.final_projection.has_value());
    }
  }
}

TEST(Simulator, SingleElementArchitecturesCoincide) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto par = doubling_params(0.3, 0.6, 2, 1, Architecture::Parallel);
    auto mux = par;
    mux.architecture = Architecture::Multiplexed;
    EXPECT_EQ(run_trial(par, seed), run_trial(mux, seed));
  }
}

TEST(Simulator, TruncationIsReported) {
  const auto params = doubling_params(0.001, 0.1, 0);
  TrialLimits limits;
  limits.max_time = 10;
  const auto r = run_trial(params, 1, limits);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.time_to_success.value(), 10);
}

TEST(Simulator, MeanTimeMatchesClosedForm) {
  for (std::int64_t tau : {0, 1, 4}) {
    auto params = doubling_params(0.3, 0.7, tau);
    params.concurrent_generation = false;
    const auto e = estimate_rate(params, 17, TrialBudget{40000});
    const double expected = analytics::mean_time_finite(0.3, 0.7, TimeUnits(tau));
    EXPECT_NEAR(e.mean_time, expected, 4.0 * e.mean_time_std_error) << "tau " << tau;
    EXPECT_EQ(e.successes, 40000u);
  }
}

TEST(Simulator, ParallelRateScalesWithCopies) {
  const auto one = estimate_rate(doubling_params(0.1, 0.5, 3, 1), 5, HorizonBudget{400000, 20});
  const auto four = estimate_rate(doubling_params(0.1, 0.5, 3, 4), 6, HorizonBudget{400000, 20});
  const double se = std::hypot(4.0 * one.std_error, four.std_error);
  EXPECT_NEAR(four.mean_rate, 4.0 * one.mean_rate, 4.0 * se);
}

TEST(Simulator, MultiplexingNeverHurts) {
  for (std::int64_t tau : {0, 2, 10}) {
    const auto par = estimate_rate(doubling_params(0.1, 0.5, tau, 4, Architecture::Parallel), 1,
                                   HorizonBudget{300000, 20});
    const auto mux = estimate_rate(doubling_params(0.1, 0.5, tau, 4, Architecture::Multiplexed), 1,
                                   HorizonBudget{300000, 20});
    EXPECT_GT(mux.mean_rate + 4.0 * mux.std_error, par.mean_rate);
  }
}

TEST(Simulator, EstimateIsThreadInvariant) {
  const auto params = doubling_params(0.2, 0.5, 2, 2, Architecture::Multiplexed);
  EstimateOptions one, four;
  four.threads = 4;
  const auto a = estimate_rate(params, 3, TrialBudget{3000}, one);
  const auto b = estimate_rate(params, 3, TrialBudget{3000}, four);
  EXPECT_EQ(a.mean_rate, b.mean_rate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.generation_rounds, b.generation_rounds);
}

TEST(Simulator, ProjectionThinsSuccesses) {
  auto params = doubling_params(0.3, 0.8, 4, 2, Architecture::Multiplexed);
  params.final_projection = 0.25;
  const auto e = estimate_rate(params, 9, HorizonBudget{400000, 20});
  ASSERT_TRUE(e.projected_rate.has_value());
  const double n = static_cast<double>(e.successes);
  EXPECT_NEAR(*e.projected_rate / e.mean_rate, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST(Simulator, NoSuccessesIsFlagged) {
  const auto e = estimate_rate(doubling_params(1e-6, 0.1, 0), 1, HorizonBudget{2000, 10});
  EXPECT_TRUE(e.no_successes);
  EXPECT_EQ(e.mean_rate, 0.0);
}
