#pragma once

// Flat key-value experiment configs with [section] headers.
//
//   # comment
//   [volume]
//   family = hyperbolic
//   m = 2
//   B = 1
//
// Keys before any header land in section "global". Every parse failure
// carries file:line. Values are single tokens or comma-separated lists;
// inline comments are not supported.

#include "common.hpp"
#include "envelope.hpp"
#include "profile.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace oscilla {

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    Config c = parse_text(buf.str(), path);
    const size_t slash = path.find_last_of('/');
    c.dir_ = slash == std::string::npos ? "." : path.substr(0, slash);
    return c;
  }

  static Config parse_text(const std::string& text, const std::string& name = "<config>") {
    Config c;
    c.name_ = name;
    std::istringstream in(text);
    std::string raw, section = "global";
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const std::string s = detail::trim(raw);
      if (s.empty() || s[0] == '#') continue;
      if (s.front() == '[') {
        if (s.back() != ']')
          throw config_error(c.where(line) + "unterminated section header");
        section = detail::trim(s.substr(1, s.size() - 2));
        if (section.empty()) throw config_error(c.where(line) + "empty section name");
        continue;
      }
      const size_t eq = s.find('=');
      if (eq == std::string::npos)
        throw config_error(c.where(line) + "expected key = value");
      const std::string key = detail::trim(s.substr(0, eq));
      const std::string value = detail::trim(s.substr(eq + 1));
      if (key.empty()) throw config_error(c.where(line) + "empty key");
      if (value.empty()) throw config_error(c.where(line) + "empty value for key '" + key + "'");
      auto& sec = c.data_[section];
      if (sec.count(key))
        throw config_error(c.where(line) + "duplicate key '" + key + "' (first at line " +
                           std::to_string(sec[key].line) + ")");
      sec[key] = Entry{value, line};
    }
    return c;
  }

  const std::string& name() const { return name_; }
  const std::string& dir() const { return dir_; }

  bool has_section(const std::string& section) const { return data_.count(section) > 0; }
  bool has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
  }

  std::string text(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
  }
  std::string text_or(const std::string& section, const std::string& key,
                      const std::string& def) const {
    return has(section, key) ? text(section, key) : def;
  }

  double number(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_number(e.value, e.line, key);
  }
  double number_or(const std::string& section, const std::string& key, double def) const {
    return has(section, key) ? number(section, key) : def;
  }

  long integer(const std::string& section, const std::string& key) const {
    const double x = number(section, key);
    const long n = static_cast<long>(x);
    if (static_cast<double>(n) != x)
      throw config_error(where(entry(section, key).line) + "key '" + key +
                         "' must be an integer");
    return n;
  }
  long integer_or(const std::string& section, const std::string& key, long def) const {
    return has(section, key) ? integer(section, key) : def;
  }

  bool flag_or(const std::string& section, const std::string& key, bool def) const {
    if (!has(section, key)) return def;
    const Entry& e = entry(section, key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw config_error(where(e.line) + "key '" + key + "' must be a boolean");
  }

  std::vector<double> number_list(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    std::vector<double> out;
    std::string token;
    std::istringstream in(e.value);
    while (std::getline(in, token, ',')) {
      token = detail::trim(token);
      if (token.empty())
        throw config_error(where(e.line) + "empty element in list '" + key + "'");
      out.push_back(parse_number(token, e.line, key));
    }
    if (out.empty()) throw config_error(where(e.line) + "empty list for key '" + key + "'");
    return out;
  }

  // file:line prefix for diagnostics raised by consumers of a section.
  std::string where_key(const std::string& section, const std::string& key) const {
    return where(entry(section, key).line);
  }

 private:
  const Entry& entry(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end())
      throw config_error(name_ + ": missing section [" + section + "]");
    auto kt = it->second.find(key);
    if (kt == it->second.end())
      throw config_error(name_ + ": section [" + section + "] is missing key '" + key + "'");
    return kt->second;
  }

  double parse_number(const std::string& token, int line, const std::string& key) const {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
      throw config_error(where(line) + "key '" + key + "' has a malformed number '" + token +
                         "'");
    return x;
  }

  std::string where(int line) const { return name_ + ":" + std::to_string(line) + ": "; }

  std::string name_;
  std::string dir_ = ".";
  std::map<std::string, std::map<std::string, Entry>> data_;
};

// Two-column numeric table: whitespace or comma delimited, # comments.
inline std::pair<std::vector<double>, std::vector<double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error(path + ": cannot open table file");
  std::vector<double> t, v;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    for (char& ch : s)
      if (ch == ',') ch = ' ';
    std::istringstream row(s);
    double a, b;
    if (!(row >> a >> b))
      throw config_error(path + ":" + std::to_string(line) + ": expected two numeric columns");
    std::string extra;
    if (row >> extra)
      throw config_error(path + ":" + std::to_string(line) + ": more than two columns");
    t.push_back(a);
    v.push_back(b);
  }
  if (t.size() < 2)
    throw config_error(path + ": table needs at least two rows");
  return {std::move(t), std::move(v)};
}

inline GrowthEnvelope envelope_from_config(const Config& cfg, const std::string& section) {
  return GrowthEnvelope(cfg.number_or(section, "Lambda", 1.0), cfg.number(section, "a"),
                        cfg.number(section, "alpha"), cfg.number_or(section, "beta", 0.0));
}

inline CoefficientProfile profile_from_config(const Config& cfg, const std::string& section) {
  const std::string family = cfg.text(section, "family");
  auto wrap = [&](const std::exception& e) {
    return config_error(cfg.where_key(section, "family") + "bad profile parameters: " +
                        e.what());
  };
  CoefficientProfile p = [&] {
    try {
      if (family == "euclidean")
        return CoefficientProfile::euclidean(static_cast<int>(cfg.integer(section, "m")));
      if (family == "hyperbolic")
        return CoefficientProfile::hyperbolic(static_cast<int>(cfg.integer(section, "m")),
                                              cfg.number_or(section, "B", 1.0));
      if (family == "superexp")
        return CoefficientProfile::superexp(static_cast<int>(cfg.integer(section, "m")),
                                            cfg.number(section, "a"),
                                            cfg.number(section, "alpha"),
                                            cfg.number_or(section, "beta", 0.0));
      if (family == "exponential")
        return CoefficientProfile::exponential(envelope_from_config(cfg, section));
      if (family == "constant")
        return CoefficientProfile::constant(cfg.number(section, "value"),
                                            cfg.number_or(section, "R", inf));
      if (family == "power")
        return CoefficientProfile::power(cfg.number(section, "coeff"),
                                         cfg.number(section, "exponent"),
                                         cfg.number_or(section, "R", inf));
      if (family == "capped_euler")
        return CoefficientProfile::capped_euler(cfg.number(section, "H"),
                                                static_cast<int>(cfg.integer(section, "m")));
      if (family == "capped_hyperbolic")
        return CoefficientProfile::capped_hyperbolic(
            cfg.number(section, "H"), static_cast<int>(cfg.integer(section, "m")),
            cfg.number_or(section, "B", 1.0));
      if (family == "growth_potential")
        return CoefficientProfile::growth_potential(envelope_from_config(cfg, section),
                                                    cfg.number(section, "c"));
      if (family == "table") {
        std::string path = cfg.text(section, "path");
        if (!path.empty() && path[0] != '/') path = cfg.dir() + "/" + path;
        auto [t, v] = read_table(path);
        return CoefficientProfile::sampled(std::move(t), std::move(v));
      }
      throw config_error(cfg.where_key(section, "family") + "unknown family '" + family + "'");
    } catch (const config_error&) {
      throw;
    } catch (const std::exception& e) {
      throw wrap(e);
    }
  }();
  if (cfg.has(section, "jumps")) {
    // loc:factor pairs, comma separated.
    const std::string pairs = cfg.text(section, "jumps");
    std::vector<std::pair<double, double>> jumps;
    std::istringstream in(pairs);
    std::string token;
    while (std::getline(in, token, ',')) {
      token = detail::trim(token);
      const size_t colon = token.find(':');
      if (colon == std::string::npos)
        throw config_error(cfg.where_key(section, "jumps") + "expected loc:factor pairs");
      try {
        jumps.emplace_back(std::stod(token.substr(0, colon)),
                           std::stod(token.substr(colon + 1)));
      } catch (const std::exception&) {
        throw config_error(cfg.where_key(section, "jumps") + "malformed jump '" + token + "'");
      }
    }
    try {
      p = p.with_jumps(jumps);
    } catch (const std::exception& e) {
      throw config_error(cfg.where_key(section, "jumps") + e.what());
    }
  }
  return p;
}

}  // namespace oscilla
