#pragma once

// Self-checks run by `muxrep verify`: algebraic identities between the closed
// forms, closed forms against the Markov-chain oracle, the DLCZ reference
// values, limit behaviour, and a short simulation cross-check.

#include <string>
#include <vector>

#include <json.hpp>

namespace muxrep::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Options {
  // Relative perturbation applied to p1 on one side of each identity; used to
  // confirm the checks can fail.
  double perturb_p1 = 0.0;
  std::uint64_t seed = 1;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite, const Options& options = {});
std::vector<CheckResult> run_all(const Options& options = {});

bool all_passed(const std::vector<CheckResult>& results);
nlohmann::json to_json(const std::vector<CheckResult>& results);

}  // namespace muxrep::verify
