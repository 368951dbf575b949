// SPDX-License-Identifier: Apache-2.0

#include "onebit/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace onebit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Location {
  std::string source;
  int line;
  std::string key;

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(source, line, key, message); }
};

template <typename T>
T parse_number(std::string_view text, const Location& loc) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) loc.fail("cannot parse '" + std::string(text) + "'");
  return value;
}

// GCC 11 lacks floating-point from_chars; strtod on a bounded copy.
template <>
double parse_number<double>(std::string_view text, const Location& loc) {
  text = trim(text);
  const std::string copy(text);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(value)) {
    loc.fail("cannot parse '" + copy + "' as a number");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, const Location& loc) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_number<T>(item, loc));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) loc.fail("empty list");
  return out;
}

int positive_int(std::string_view v, const Location& loc) {
  const int x = parse_number<int>(v, loc);
  if (x < 1) loc.fail("must be a positive integer, got " + std::to_string(x));
  return x;
}

using Setter = std::function<void(ParsedConfig&, std::string_view, const Location&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"n_users", [](ParsedConfig& c, std::string_view v, const Location& l) { c.cfg.n_users = positive_int(v, l); }},
      {"n_rx", [](ParsedConfig& c, std::string_view v, const Location& l) { c.cfg.n_rx = positive_int(v, l); }},
      {"oversampling",
       [](ParsedConfig& c, std::string_view v, const Location& l) { c.cfg.oversampling = positive_int(v, l); }},
      {"block_len", [](ParsedConfig& c, std::string_view v, const Location& l) { c.cfg.block_len = positive_int(v, l); }},
      {"pilot_len", [](ParsedConfig& c, std::string_view v, const Location& l) { c.cfg.pilot_len = positive_int(v, l); }},
      {"rolloff",
       [](ParsedConfig& c, std::string_view v, const Location& l) {
         const double x = parse_number<double>(v, l);
         if (!(x > 0.0 && x <= 1.0)) l.fail("out of range: rolloff must lie in (0, 1]");
         c.cfg.rolloff = x;
       }},
      {"forgetting",
       [](ParsedConfig& c, std::string_view v, const Location& l) {
         const double x = parse_number<double>(v, l);
         if (!(x > 0.0 && x <= 1.0)) l.fail("out of range: forgetting must lie in (0, 1]");
         c.cfg.forgetting = x;
       }},
      {"seed",
       [](ParsedConfig& c, std::string_view v, const Location& l) { c.cfg.seed = parse_number<std::uint64_t>(v, l); }},
      {"snr_db_grid",
       [](ParsedConfig& c, std::string_view v, const Location& l) { c.sweep.snr_db_grid = parse_list<double>(v, l); }},
      {"pilot_grid",
       [](ParsedConfig& c, std::string_view v, const Location& l) {
         c.sweep.pilot_grid = parse_list<int>(v, l);
         for (int t : c.sweep.pilot_grid) {
           if (t < 1) l.fail("pilot lengths must be positive");
         }
       }},
      {"oversampling_set",
       [](ParsedConfig& c, std::string_view v, const Location& l) {
         auto set = parse_list<int>(v, l);
         for (int m : set) {
           if (m < 1) l.fail("oversampling factors must be positive");
         }
         std::sort(set.begin(), set.end());
         set.erase(std::unique(set.begin(), set.end()), set.end());
         c.sweep.oversampling_set = set;
       }},
      {"n_trials",
       [](ParsedConfig& c, std::string_view v, const Location& l) { c.sweep.n_trials = positive_int(v, l); }},
  };
  return table;
}

void apply(ParsedConfig& out, std::string_view entry, const Location& where_template, bool allow_blank) {
  Location loc = where_template;
  const auto hash = entry.find('#');
  entry = trim(entry.substr(0, hash));
  if (entry.empty()) {
    if (allow_blank) return;
    loc.fail("empty override");
  }
  const auto eq = entry.find('=');
  if (eq == std::string_view::npos) loc.fail("expected key=value");
  const std::string_view key = trim(entry.substr(0, eq));
  loc.key = std::string(key);
  const auto it = setters().find(key);
  if (it == setters().end()) loc.fail("unknown key");
  it->second(out, trim(entry.substr(eq + 1)), loc);
}

ParsedConfig defaults() {
  ParsedConfig c;
  c.cfg = SystemConfig{};
  c.sweep.snr_db_grid = {-10, -5, 0, 5, 10, 15, 20};
  c.sweep.pilot_grid = {10, 20, 40, 80};
  c.sweep.oversampling_set = {1, 2, 3};
  c.sweep.n_trials = 500;
  return c;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& key, const std::string& message)
    : InvalidArgument(source + ":" + std::to_string(line) + (key.empty() ? "" : ": key '" + key + "'") + ": " +
                      message),
      key_(key),
      line_(line) {}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

ParsedConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                               const std::string& source) {
  ParsedConfig out = defaults();
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    apply(out, line, Location{source, ++line_no, {}}, true);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  int idx = 0;
  for (const auto& o : overrides) apply(out, o, Location{"--set", ++idx, {}}, false);

  try {
    out.cfg.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(source, 0, {}, e.what());
  }
  out.sweep.base_cfg = out.cfg;
  return out;
}

ParsedConfig parse_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
  if (!path) return parse_config_text({}, overrides, "<defaults>");
  std::ifstream in(*path);
  if (!in) throw ConfigIoError("cannot open config file '" + path->string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides, path->string());
}

}  // namespace onebit
