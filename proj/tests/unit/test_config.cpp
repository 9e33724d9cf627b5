#include <gtest/gtest.h>

#include <random>

#include "muxrep/config.hpp"

using namespace muxrep;

TEST(KeyValueConfig, ParsesCommentsListsAndWhitespace) {
  const auto cfg = KeyValueConfig::parse(
      "# header\n"
      "\n"
      "repeater.N = 3\n"
      "  repeater.p_conn =0.698, 0.496 ,0.311  \n"
      "repeater.architecture = multiplexed\n");
  EXPECT_EQ(cfg.get_int("repeater.N"), 3);
  EXPECT_EQ(cfg.get_doubles("repeater.p_conn"), (std::vector<double>{0.698, 0.496, 0.311}));
  EXPECT_EQ(cfg.get_string("repeater.architecture"), "multiplexed");
  EXPECT_FALSE(cfg.get_string("repeater.tau").has_value());
  EXPECT_EQ(cfg.section("repeater").size(), 3u);
}

TEST(KeyValueConfig, RejectsMalformedInput) {
  EXPECT_THROW(KeyValueConfig::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse("bad key! = 1\n"), ConfigError);
  const auto cfg = KeyValueConfig::parse("x = abc\ny = 1.5\n");
  EXPECT_THROW(cfg.get_double("x"), ConfigError);
  EXPECT_THROW(cfg.get_int("y"), ConfigError);
  EXPECT_THROW(cfg.get_bool("x"), ConfigError);
}

TEST(KeyValueConfig, IntegersAcceptExponentNotation) {
  EXPECT_EQ(parse_int("10000000"), 10000000);
  EXPECT_EQ(parse_int("1e7"), 10000000);
  EXPECT_THROW(parse_int("1.5"), ConfigError);
}

TEST(KeyValueConfig, MissingRepeaterKeysKeepBase) {
  const auto base = doubling_params(0.3, 0.4, 7, 2, Architecture::Multiplexed);
  const auto cfg = KeyValueConfig::parse("repeater.tau = 9\n");
  const auto p = read_repeater_params(cfg, base);
  EXPECT_EQ(p.tau.value(), 9);
  EXPECT_EQ(p.p_gen, 0.3);
  EXPECT_EQ(p.architecture, Architecture::Multiplexed);
}

TEST(KeyValueConfig, InvalidParamsRaiseValidationError) {
  const auto cfg = KeyValueConfig::parse("repeater.p_gen = 1.5\n");
  EXPECT_THROW(read_repeater_params(cfg), ValidationError);
  const auto mismatch = KeyValueConfig::parse("repeater.N = 2\nrepeater.p_conn = 0.5\n");
  EXPECT_THROW(read_repeater_params(mismatch), ValidationError);
}

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
}

namespace {

RepeaterParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RepeaterParams p;
  p.levels = 1 + static_cast<int>(rng() % 4);
  p.elements = 1 + static_cast<int>(rng() % 50);
  p.tau = TimeUnits(static_cast<std::int64_t>(rng() % 10000));
  p.p_gen = u(rng);
  p.p_conn.clear();
  p.level_latency.clear();
  for (int k = 0; k < p.levels; ++k) {
    p.p_conn.push_back(u(rng));
    p.level_latency.push_back(1 + static_cast<std::int64_t>(rng() % 9));
  }
  p.architecture = rng() % 2 ? Architecture::Parallel : Architecture::Multiplexed;
  if (rng() % 2) p.final_projection = u(rng);
  p.concurrent_generation = rng() % 2;
  return p;
}

}  // namespace

TEST(KeyValueConfig, RepeaterParamsRoundTripProperty) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_params(rng);
    KeyValueConfig cfg;
    write_repeater_params(cfg, p);
    const auto text = cfg.serialize();
    const auto back = KeyValueConfig::parse(text);
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(read_repeater_params(back), p) << text;
  }
}
