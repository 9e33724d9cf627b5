#include "muxrep/types.hpp"

#include <cctype>
#include <sstream>

namespace muxrep {

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::Parallel: return "parallel";
    case Architecture::Multiplexed: return "multiplexed";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "parallel" || lower == "par") return Architecture::Parallel;
  if (lower == "multiplexed" || lower == "mux") return Architecture::Multiplexed;
  throw ValidationError("unknown architecture: " + std::string(text));
}

std::vector<std::int64_t> default_level_latency(int levels) {
  std::vector<std::int64_t> out;
  for (int k = 1; k <= levels; ++k) out.push_back(std::int64_t{1} << (k - 1));
  return out;
}

RepeaterParams doubling_params(double p0, double p1, std::int64_t tau, int n, Architecture arch) {
  RepeaterParams p;
  p.levels = 1;
  p.elements = n;
  p.tau = TimeUnits(tau);
  p.p_gen = p0;
  p.p_conn = {p1};
  p.level_latency = {1};
  p.architecture = arch;
  return p;
}

namespace {

void check_probability(double value, std::string_view name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    std::ostringstream os;
    os << "probability out of range: " << name << " = " << value;
    throw ValidationError(os.str());
  }
}

}  // namespace

const RepeaterParams& validate(const RepeaterParams& params) {
  if (params.levels < 1) {
    throw ValidationError("levels must be positive: N = " + std::to_string(params.levels));
  }
  // 2^N segments with n elements each; beyond this the chain is not simulable.
  if (params.levels > 20) {
    throw ValidationError("levels too large: N = " + std::to_string(params.levels));
  }
  if (params.elements < 1) {
    throw ValidationError("elements must be positive: n = " + std::to_string(params.elements));
  }
  check_probability(params.p_gen, "p_gen");
  if (params.p_conn.size() != static_cast<std::size_t>(params.levels)) {
    throw ValidationError("list-length mismatch: p_conn has " + std::to_string(params.p_conn.size()) +
                          " entries, expected N = " + std::to_string(params.levels));
  }
  if (params.level_latency.size() != static_cast<std::size_t>(params.levels)) {
    throw ValidationError("list-length mismatch: level_latency has " +
                          std::to_string(params.level_latency.size()) +
                          " entries, expected N = " + std::to_string(params.levels));
  }
  for (std::size_t i = 0; i < params.p_conn.size(); ++i) {
    check_probability(params.p_conn[i], "p_conn[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < params.level_latency.size(); ++i) {
    if (params.level_latency[i] < 1) {
      throw ValidationError("latency must be positive: level_latency[" + std::to_string(i) +
                            "] = " + std::to_string(params.level_latency[i]));
    }
  }
  if (params.final_projection) check_probability(*params.final_projection, "final_projection");
  return params;
}

}  // namespace muxrep
