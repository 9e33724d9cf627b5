#include <gtest/gtest.h>

#include <set>

#include "muxrep/philox.hpp"

using namespace muxrep;

TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
  PhiloxEngine a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
  }
}

TEST(Philox, UniformMomentsAndRange) {
  PhiloxEngine e(7);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = e.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12.0, 2e-3);
}

TEST(Philox, GeometricFailuresMean) {
  for (double p : {0.5, 0.1, 0.001}) {
    PhiloxEngine e(3);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(e.geometric_failures(p));
    const double mean = (1.0 - p) / p;
    const double sd = std::sqrt(1.0 - p) / p;
    EXPECT_NEAR(sum / n, mean, 4.0 * sd / std::sqrt(n));
  }
  PhiloxEngine e(3);
  EXPECT_EQ(e.geometric_failures(1.0), 0u);
  EXPECT_EQ(e.geometric_failures(0.0), PhiloxEngine::max());
}

TEST(Philox, DerivedSeedsDoNotCollide) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t base : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(base, i));
  }
  EXPECT_EQ(seen.size(), 3000u);
}
