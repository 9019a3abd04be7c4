#pragma once

// Flat key=value experiment configuration, one experiment per file.
// '#' starts a comment; blank lines are ignored; keys are unique.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "plr/core.hpp"
#include "plr/io.hpp"

namespace plr {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& is) {
    KeyValueConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      const auto body = detail::trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key=value", lineno);
      const std::string key(detail::trim(body.substr(0, eq)));
      const std::string value(detail::trim(body.substr(eq + 1)));
      if (key.empty()) throw ParseError("empty key", lineno);
      if (c.values_.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
      c.values_[key] = value;
    }
    return c;
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
  }

  static KeyValueConfig load(const std::string& path) {
    std::istringstream is(read_file(path));
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ParameterError("config: missing key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    return has(key) ? require_double(key) : fallback;
  }

  std::optional<double> get_optional_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return require_double(key);
  }

  double require_double(const std::string& key) const {
    const std::string v = require_string(key);
    try {
      return detail::parse_double(v, 0);
    } catch (const ParseError&) {
      throw ParameterError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = require_string(key);
    try {
      return detail::parse_int(v, 0);
    } catch (const ParseError&) {
      throw ParameterError("config: key '" + key + "' expects an integer, got '" + v +
                           "'");
    }
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = require_string(key);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ParameterError("config: key '" + key + "' expects an unsigned integer");
    }
    return out;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = require_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParameterError("config: key '" + key + "' expects true/false");
  }

  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const std::string text = require_string(key);
    for (auto f : detail::split(text, ',')) {
      if (f.empty()) continue;
      try {
        out.push_back(detail::parse_double(f, 0));
      } catch (const ParseError&) {
        throw ParameterError("config: key '" + key + "' has a bad list entry '" +
                             std::string(f) + "'");
      }
    }
    return out;
  }

  // Throws on keys outside `known`, which catches typos early.
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_) {
      if (!known.count(k)) throw ParameterError("config: unknown key '" + k + "'");
    }
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace plr
