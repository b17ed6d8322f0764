#pragma once

// Flat key = value run configuration with dotted keys.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfb::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Params {
 public:
  /// Parses "key = value" lines; '#' starts a comment. Later keys replace
  /// earlier ones.
  static Params parse(const std::string& text, const std::string& origin);
  static Params load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Typed lookups; each records the key (with its effective value) for the
  /// manifest echo and throws ConfigError on malformed values.
  double real(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::uint64_t u64(const std::string& key, std::uint64_t fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback);
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);

  /// Throws ConfigError naming any supplied key no lookup consumed.
  void reject_unused() const;

  /// Effective value of every key looked up, in key order.
  const std::map<std::string, std::string>& echo() const { return echo_; }

 private:
  std::string raw(const std::string& key, const std::string& fallback);

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  std::map<std::string, std::string> echo_;
};

double parse_real(const std::string& s, const std::string& what);

}  // namespace qfb::cli
