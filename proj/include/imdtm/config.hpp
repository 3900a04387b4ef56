#pragma once

// Flat `key = value` run configuration.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "imdtm/errors.hpp"
#include "imdtm/evolver.hpp"

namespace imdtm {

enum class Scheme { imdtm, rk4 };

struct RunConfig {
  std::string equation;
  Scheme scheme = Scheme::imdtm;
  int n = 0;
  double length = 0.0;
  double dt = 0.0;
  int steps = 0;
  int stored_orders = 1;
  int radius = 1;
  Stacking stacking = Stacking::none;
  int max_order = 0;  // 0 = interpolant capacity
  int rk4_accuracy = 8;
  std::optional<double> a_param;  // mKdV only; unset = pi / L
  std::string output_path = "diagnostics.csv";
  int record_every = 1;

  bool operator==(const RunConfig&) const = default;

  EvolverConfig evolver(int threads = 1) const {
    EvolverConfig c;
    c.dt = dt;
    c.steps = steps;
    c.radius = radius;
    c.stored_orders = stored_orders;
    c.stacking = stacking;
    c.max_order = max_order;
    c.threads = threads;
    return c;
  }
};

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace config_detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;  // 0 = command-line flag
};

inline int to_int(const std::string& key, const Entry& e) {
  int v = 0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(key, e.line, "expected an integer, got '" + e.value + "'");
  return v;
}

inline double to_double(const std::string& key, const Entry& e) {
  double v = 0.0;
  const auto* end = e.value.data() + e.value.size();
  const auto res = std::from_chars(e.value.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
    throw ConfigError(key, e.line, "expected a finite number, got '" + e.value + "'");
  return v;
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{"equation", "scheme",       "N",           "L",       "dt",
                                             "steps",    "H_stored",     "radius",      "stacking", "max_order",
                                             "rk4_accuracy", "a_param",  "output_path", "record_every"};
  return keys;
}

}  // namespace config_detail

/// Parses config text; `overrides` (key, value) pairs replace file entries.
/// Errors name the offending key and, for file entries, the line.
inline RunConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  using namespace config_detail;
  std::map<std::string, Entry> entries;
  const auto is_known = [](const std::string& key) {
    for (const auto& k : known_keys())
      if (k == key) return true;
    return false;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(line), line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", line_no, "missing key before '='");
    if (!is_known(key)) throw ConfigError(key, line_no, "unknown key");
    if (value.empty()) throw ConfigError(key, line_no, "missing value");
    if (entries.contains(key)) throw ConfigError(key, line_no, "duplicate key");
    entries[key] = Entry{value, line_no};
  }
  for (const auto& [key, value] : overrides) {
    if (!is_known(key)) throw ConfigError(key, 0, "unknown key");
    entries[key] = Entry{value, 0};
  }

  const auto require = [&](const std::string& key) -> const Entry& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(key, 0, "required key is missing");
    return it->second;
  };
  const auto line_of = [&](const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  };
  const auto positive_int = [&](const std::string& key, int& out) {
    if (const auto it = entries.find(key); it != entries.end()) {
      out = to_int(key, it->second);
      if (out < 1) throw ConfigError(key, it->second.line, "must be positive");
    }
  };

  RunConfig c;
  {
    const auto& e = require("equation");
    if (e.value != "wave" && e.value != "mkdv")
      throw ConfigError("equation", e.line, "expected 'wave' or 'mkdv', got '" + e.value + "'");
    c.equation = e.value;
  }
  if (const auto it = entries.find("scheme"); it != entries.end()) {
    if (it->second.value == "imdtm")
      c.scheme = Scheme::imdtm;
    else if (it->second.value == "rk4")
      c.scheme = Scheme::rk4;
    else
      throw ConfigError("scheme", it->second.line, "expected 'imdtm' or 'rk4', got '" + it->second.value + "'");
  }
  c.n = to_int("N", require("N"));
  if (c.n < 1) throw ConfigError("N", line_of("N"), "must be positive");
  c.length = to_double("L", require("L"));
  if (c.length <= 0.0) throw ConfigError("L", line_of("L"), "must be positive");
  c.dt = to_double("dt", require("dt"));
  if (c.dt <= 0.0) throw ConfigError("dt", line_of("dt"), "must be positive");
  c.steps = to_int("steps", require("steps"));
  if (c.steps < 0) throw ConfigError("steps", line_of("steps"), "must be non-negative");
  positive_int("H_stored", c.stored_orders);
  if (const auto it = entries.find("radius"); it != entries.end()) {
    c.radius = to_int("radius", it->second);
    if (c.radius < 1) throw ConfigError("radius", it->second.line, "neighborhood must include neighbors (radius >= 1)");
  }
  c.stacking = c.stored_orders > 2 ? Stacking::pairs : Stacking::none;
  if (const auto it = entries.find("stacking"); it != entries.end()) {
    if (it->second.value == "none")
      c.stacking = Stacking::none;
    else if (it->second.value == "pairs")
      c.stacking = Stacking::pairs;
    else
      throw ConfigError("stacking", it->second.line, "expected 'none' or 'pairs', got '" + it->second.value + "'");
  }
  if (const auto it = entries.find("max_order"); it != entries.end()) {
    c.max_order = to_int("max_order", it->second);
    if (c.max_order < 0) throw ConfigError("max_order", it->second.line, "must be non-negative");
  }
  if (const auto it = entries.find("rk4_accuracy"); it != entries.end()) {
    c.rk4_accuracy = to_int("rk4_accuracy", it->second);
    if (c.rk4_accuracy < 2 || c.rk4_accuracy % 2 != 0)
      throw ConfigError("rk4_accuracy", it->second.line, "must be an even order >= 2");
  }
  if (const auto it = entries.find("a_param"); it != entries.end()) {
    c.a_param = to_double("a_param", it->second);
    if (*c.a_param <= 0.0) throw ConfigError("a_param", it->second.line, "must be positive");
  }
  if (const auto it = entries.find("output_path"); it != entries.end()) c.output_path = it->second.value;
  positive_int("record_every", c.record_every);

  if (c.scheme == Scheme::imdtm) {
    try {
      validate(c.evolver(), c.n);
    } catch (const ConfigError& err) {
      if (err.key().empty()) throw;
      const std::string msg = err.what();
      const std::string prefix = "'" + err.key() + "': ";
      throw ConfigError(err.key(), line_of(err.key()), msg.substr(msg.find(prefix) == 0 ? prefix.size() : 0));
    }
  } else if (c.n < c.rk4_accuracy + 3) {
    throw ConfigError("N", line_of("N"), "grid too small for the rk4_accuracy stencil");
  }
  return c;
}

/// Writes every field so that parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  out << "equation = " << c.equation << '\n';
  out << "scheme = " << (c.scheme == Scheme::imdtm ? "imdtm" : "rk4") << '\n';
  out << "N = " << c.n << '\n';
  out << "L = " << format_double(c.length) << '\n';
  out << "dt = " << format_double(c.dt) << '\n';
  out << "steps = " << c.steps << '\n';
  out << "H_stored = " << c.stored_orders << '\n';
  out << "radius = " << c.radius << '\n';
  out << "stacking = " << (c.stacking == Stacking::pairs ? "pairs" : "none") << '\n';
  out << "max_order = " << c.max_order << '\n';
  out << "rk4_accuracy = " << c.rk4_accuracy << '\n';
  if (c.a_param) out << "a_param = " << format_double(*c.a_param) << '\n';
  out << "output_path = " << c.output_path << '\n';
  out << "record_every = " << c.record_every << '\n';
  return out.str();
}

}  // namespace imdtm
