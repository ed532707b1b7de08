#pragma once

// Run configuration: a TOML subset (tables, key = value, strings, numbers,
// booleans, flat arrays of numbers, # comments) layered as
// defaults < config file < command-line overrides.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pauli/error.hpp"

namespace pauli {

class RunConfig {
 public:
  using Value = std::variant<bool, double, std::string, std::vector<double>>;

  RunConfig() { load_defaults(); }

  /// Every key with its default. Keys are "table.name"; top-level keys have
  /// no table prefix.
  void load_defaults() {
    values_.clear();
    set("weight", std::string("|z1|^2"));
    set("n", 0.0);  // 0: inferred from the weight
    set("L", 8.0);
    set("h", 0.1);
    set("scheme", std::string("peierls"));
    set("grid_cap", 200000.0);
    set("output_dir", std::string("out"));
    set("threads", 1.0);

    set("spectrum.operator", std::string("pauli+"));
    set("spectrum.k", 6.0);
    set("spectrum.tol", 1e-6);
    set("spectrum.kernel_tol", 0.1);
    set("spectrum.shift_invert", true);
    set("spectrum.max_iterations", 5000.0);

    set("identity.which", std::string("all"));
    set("identity.L", 6.0);
    set("identity.h", 0.2);
    set("identity.levels", 3.0);

    set("doubling.centers_per_axis", 9.0);
    set("doubling.extent", 8.0);
    set("doubling.radii", std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0});
    set("doubling.rule", 16.0);

    set("criteria.radii", std::vector<double>{1, 2, 4, 8, 16, 32});
    set("criteria.directions", 0.0);
    set("criteria.ball_order", 16.0);

    set("proxy.L_values", std::vector<double>{4, 6, 8});
    set("proxy.h", 0.1);
    set("proxy.k", 6.0);
    set("proxy.eps", 0.1);
    set("proxy.Lambda", 10.0);
    set("proxy.tol", 1e-6);

    set("landau.L", 8.0);
    set("landau.h", 0.1);
    set("landau.k", 6.0);
    set("landau.tol", 1e-6);
    set("landau.identity_L", 6.0);
    set("landau.identity_h", 0.2);
    set("landau.identity_levels", 3.0);
    set("landau.zero_mode_L", std::vector<double>{4, 6, 8});
    set("landau.zero_mode_h", 0.1);
    set("landau.eps", 0.1);
    set("landau.dense_oracle", true);
    set("landau.oracle_L", 4.0);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }

  /// Overrides an existing key from text, converting to the key's type.
  void set_text(const std::string& key, const std::string& text) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    if (std::holds_alternative<std::string>(it->second) && (text.empty() || text.front() != '"')) {
      it->second = text;
      return;
    }
    const Value parsed = parse_value(text, key);
    it->second = coerce(it->second, parsed, key);
  }

  double number(const std::string& key) const { return get<double>(key, "a number"); }
  bool flag(const std::string& key) const { return get<bool>(key, "a boolean"); }
  const std::string& text(const std::string& key) const { return get<std::string>(key, "a string"); }
  const std::vector<double>& list(const std::string& key) const { return get<std::vector<double>>(key, "an array"); }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  /// Merges a TOML-subset document; every key must already exist.
  void merge(std::istream& in, const std::string& source = "config") {
    std::string line, table;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string s = trim(strip_comment(line));
      if (s.empty()) continue;
      const std::string where = source + ":" + std::to_string(lineno);
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError(where + ": unterminated table header");
        table = trim(s.substr(1, s.size() - 2));
        if (table.empty()) throw ConfigError(where + ": empty table name");
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
      const std::string name = trim(s.substr(0, eq));
      const std::string key = table.empty() ? name : table + "." + name;
      const auto it = values_.find(key);
      if (it == values_.end()) throw ConfigError(where + ": unknown key '" + key + "'");
      it->second = coerce(it->second, parse_value(trim(s.substr(eq + 1)), where), where);
    }
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    merge(in, path);
  }

  /// The fully resolved configuration as a TOML document (stable order).
  std::string to_toml() const {
    std::ostringstream out;
    out << "# resolved configuration\n";
    std::string current;
    for (const auto& [key, value] : values_)
      if (key.find('.') == std::string::npos) out << key << " = " << format(value) << "\n";
    for (const auto& [key, value] : values_) {
      const auto dot = key.find('.');
      if (dot == std::string::npos) continue;
      const std::string table = key.substr(0, dot);
      if (table != current) {
        out << "\n[" << table << "]\n";
        current = table;
      }
      out << key.substr(dot + 1) << " = " << format(value) << "\n";
    }
    return out.str();
  }

  static std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }

 private:
  template <class T>
  const T& get(const std::string& key, const char* kind) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    if (const T* v = std::get_if<T>(&it->second)) return *v;
    throw ConfigError("config key '" + key + "' is not " + std::string(kind));
  }

  static std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static double parse_number(const std::string& t, const std::string& where) {
    std::string cleaned;
    for (char c : t)
      if (c != '_') cleaned += c;
    double v = 0.0;
    const char* first = cleaned.data();
    const char* last = first + cleaned.size();
    if (!cleaned.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) throw ConfigError(where + ": invalid number '" + t + "'");
    return v;
  }

  static Value parse_value(const std::string& t, const std::string& where) {
    if (t.empty()) throw ConfigError(where + ": missing value");
    if (t.front() == '"') {
      if (t.size() < 2 || t.back() != '"') throw ConfigError(where + ": unterminated string");
      std::string out;
      for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        if (t[i] == '\\' && i + 2 < t.size()) {
          const char e = t[++i];
          out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          out += t[i];
        }
      }
      return out;
    }
    if (t == "true") return true;
    if (t == "false") return false;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated array");
      std::vector<double> items;
      std::stringstream body(t.substr(1, t.size() - 2));
      std::string item;
      while (std::getline(body, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(parse_number(item, where));
      }
      return items;
    }
    return parse_number(t, where);
  }

  /// Converts `v` to the type of `current`; a scalar widens to a one-element array.
  static Value coerce(const Value& current, const Value& v, const std::string& where) {
    if (current.index() == v.index()) return v;
    if (std::holds_alternative<std::vector<double>>(current) && std::holds_alternative<double>(v)) {
      return std::vector<double>{std::get<double>(v)};
    }
    throw ConfigError(where + ": value has the wrong type");
  }

  static std::string format(const Value& v) {
    if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const double* d = std::get_if<double>(&v)) return format_number(*d);
    if (const std::string* s = std::get_if<std::string>(&v)) {
      std::string out = "\"";
      for (char c : *s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    const auto& list = std::get<std::vector<double>>(v);
    std::string out = "[";
    for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ", " : "") + format_number(list[i]);
    return out + "]";
  }

  std::map<std::string, Value> values_;
};

}  // namespace pauli
