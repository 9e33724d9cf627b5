#pragma once

// Flat key-value configuration files.
//
//   # comment
//   repeater.N     = 3
//   repeater.p_conn = 0.698, 0.496, 0.311
//
// One `key = value` per line. Keys are dotted identifiers ([A-Za-z0-9_.]);
// values run to end of line with surrounding whitespace trimmed. Lists are
// comma-separated. Blank lines and lines starting with '#' are ignored.
// Duplicate keys are an error.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "muxrep/types.hpp"

namespace muxrep {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string& path);

  std::string serialize() const;

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, std::string value);
  void erase(const std::string& key) { entries_.erase(key); }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<double>> get_doubles(const std::string& key) const;
  std::optional<std::vector<std::int64_t>> get_ints(const std::string& key) const;

  // Keys under `prefix.` with the prefix stripped.
  std::map<std::string, std::string> section(const std::string& prefix) const;

  bool operator==(const KeyValueConfig&) const = default;

 private:
  std::map<std::string, std::string> entries_;
};

// Locale-independent shortest round-trip formatting.
std::string format_double(double value);
std::string format_list(const std::vector<double>& values);
std::string format_list(const std::vector<std::int64_t>& values);

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::vector<std::string> split_list(std::string_view text);

void write_repeater_params(KeyValueConfig& cfg, const RepeaterParams& params,
                           const std::string& prefix = "repeater");

/// Reads `prefix.*` keys over `base`; keys absent from the file keep the
/// base value. The result is validated.
RepeaterParams read_repeater_params(const KeyValueConfig& cfg, RepeaterParams base = {},
                                    const std::string& prefix = "repeater");

}  // namespace muxrep
