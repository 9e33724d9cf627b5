#include "muxrep/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace muxrep {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw ConfigError("cannot format number");
  return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string format_list(const std::vector<std::int64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) return value;
  // Accept integral values written in floating notation, e.g. "1e7".
  const double d = parse_double(text);
  if (d != static_cast<double>(static_cast<std::int64_t>(d))) {
    throw ConfigError("not an integer: '" + std::string(text) + "'");
  }
  return static_cast<std::int64_t>(d);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.emplace_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    ++line_no;
    pos = eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    cfg.entries_.emplace(key, std::string(trim(line.substr(eq + 1))));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

void KeyValueConfig::set(const std::string& key, std::string value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  if (value.find('\n') != std::string::npos) throw ConfigError("value for '" + key + "' spans lines");
  entries_[key] = std::string(trim(value));
}

std::optional<std::string> KeyValueConfig::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  try {
    return parse_double(*s);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  try {
    return parse_int(*s);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  if (*s == "true" || *s == "1" || *s == "yes" || *s == "on") return true;
  if (*s == "false" || *s == "0" || *s == "no" || *s == "off") return false;
  throw ConfigError(key + ": not a boolean: '" + *s + "'");
}

std::optional<std::vector<double>> KeyValueConfig::get_doubles(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::vector<double> out;
  try {
    for (const auto& item : split_list(*s)) out.push_back(parse_double(item));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
  return out;
}

std::optional<std::vector<std::int64_t>> KeyValueConfig::get_ints(const std::string& key) const {
  auto s = get_string(key);
  if (!s) return std::nullopt;
  std::vector<std::int64_t> out;
  try {
    for (const auto& item : split_list(*s)) out.push_back(parse_int(item));
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
  return out;
}

std::map<std::string, std::string> KeyValueConfig::section(const std::string& prefix) const {
  std::map<std::string, std::string> out;
  const std::string dotted = prefix + ".";
  for (auto it = entries_.lower_bound(dotted); it != entries_.end(); ++it) {
    if (it->first.compare(0, dotted.size(), dotted) != 0) break;
    out.emplace(it->first.substr(dotted.size()), it->second);
  }
  return out;
}

void write_repeater_params(KeyValueConfig& cfg, const RepeaterParams& p, const std::string& prefix) {
  const auto key = [&](const char* name) { return prefix + "." + name; };
  cfg.set(key("N"), std::to_string(p.levels));
  cfg.set(key("n"), std::to_string(p.elements));
  cfg.set(key("tau"), std::to_string(p.tau.value()));
  cfg.set(key("p_gen"), format_double(p.p_gen));
  cfg.set(key("p_conn"), format_list(p.p_conn));
  cfg.set(key("level_latency"), format_list(p.level_latency));
  cfg.set(key("architecture"), std::string(to_string(p.architecture)));
  cfg.set(key("final_projection"), p.final_projection ? format_double(*p.final_projection) : "none");
  cfg.set(key("concurrent_generation"), p.concurrent_generation ? "true" : "false");
}

RepeaterParams read_repeater_params(const KeyValueConfig& cfg, RepeaterParams base, const std::string& prefix) {
  const auto key = [&](const char* name) { return prefix + "." + name; };
  RepeaterParams p = std::move(base);
  if (auto v = cfg.get_int(key("N"))) {
    const bool relatency = !cfg.contains(key("level_latency")) &&
                           p.level_latency.size() != static_cast<std::size_t>(*v);
    p.levels = static_cast<int>(*v);
    if (relatency) p.level_latency = default_level_latency(p.levels);
  }
  if (auto v = cfg.get_int(key("n"))) p.elements = static_cast<int>(*v);
  if (auto v = cfg.get_int(key("tau"))) p.tau = TimeUnits(*v);
  if (auto v = cfg.get_double(key("p_gen"))) p.p_gen = *v;
  if (auto v = cfg.get_doubles(key("p_conn"))) p.p_conn = *v;
  if (auto v = cfg.get_ints(key("level_latency"))) p.level_latency = *v;
  if (auto v = cfg.get_string(key("architecture"))) p.architecture = parse_architecture(*v);
  if (auto v = cfg.get_string(key("final_projection"))) {
    if (*v == "none" || v->empty()) {
      p.final_projection.reset();
    } else {
      p.final_projection = *cfg.get_double(key("final_projection"));
    }
  }
  if (auto v = cfg.get_bool(key("concurrent_generation"))) p.concurrent_generation = *v;
  validate(p);
  return p;
}

}  // namespace muxrep
