#ifndef HULLCERT_CONFIG_HPP_
#define HULLCERT_CONFIG_HPP_

/**
 * @file
 * @brief Flat key=value configuration files.
 *
 * One entry per line, '#' starts a comment, surrounding whitespace is
 * trimmed, lists are comma separated. A key may appear only once.
 */

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hullcert/core.hpp"

namespace hullcert {

class ConfigError : public InvalidArgument
{
public:
  using InvalidArgument::InvalidArgument;
};

class Config
{
public:
  Config() = default;

  static Config parse(std::istream & is, const std::string & origin = "<config>")
  {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim_(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
      }
      const std::string key = trim_(line.substr(0, eq));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      if (!c.values_.emplace(key, trim_(line.substr(eq + 1))).second) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      }
    }
    return c;
  }

  static Config load(const std::string & path)
  {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    return parse(f, path);
  }

  bool has(const std::string & key) const { return values_.count(key) != 0; }

  void set(const std::string & key, const std::string & value) { values_[key] = value; }

  std::string get_string(const std::string & key, const std::string & fallback) const
  {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string & key) const
  {
    if (!has(key)) throw ConfigError("missing required key '" + key + "'");
    return values_.at(key);
  }

  double get_double(const std::string & key, double fallback) const
  {
    return has(key) ? to_double_(key, values_.at(key)) : fallback;
  }

  long get_long(const std::string & key, long fallback) const
  {
    return has(key) ? to_long_(key, values_.at(key)) : fallback;
  }

  bool get_bool(const std::string & key, bool fallback) const
  {
    if (!has(key)) return fallback;
    const auto & v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
  }

  std::vector<long> get_long_list(const std::string & key, const std::vector<long> & fallback) const
  {
    if (!has(key)) return fallback;
    std::vector<long> out;
    for (const auto & item : split_(values_.at(key))) out.push_back(to_long_(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
  }

  std::vector<double> get_double_list(const std::string & key, const std::vector<double> & fallback) const
  {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto & item : split_(values_.at(key))) out.push_back(to_double_(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
  }

  /// Throws on any key outside `allowed`.
  void require_known(const std::set<std::string> & allowed) const
  {
    for (const auto & [k, v] : values_) {
      if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

  const std::map<std::string, std::string> & entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;

  static std::string trim_(const std::string & s)
  {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split_(const std::string & s)
  {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim_(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static double to_double_(const std::string & key, const std::string & v)
  {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception &) {
      throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
  }

  static long to_long_(const std::string & key, const std::string & v)
  {
    try {
      std::size_t pos = 0;
      const long d = std::stol(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception &) {
      throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
  }
};

}  // namespace hullcert

#endif  // HULLCERT_CONFIG_HPP_
