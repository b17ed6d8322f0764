#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qfb::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_int(const std::string& s, const std::string& what) {
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  }
  return v;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

}  // namespace

double parse_real(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "pi") return M_PI;
  double v = 0.0;
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  }
  return v;
}

Params Params::parse(const std::string& text, const std::string& origin) {
  Params p;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    p.values_[key] = trim(line.substr(eq + 1));
  }
  return p;
}

Params Params::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string Params::raw(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Params::real(const std::string& key, double fallback) {
  if (!has(key)) {
    used_.insert(key);
    std::ostringstream os;
    os.precision(17);
    os << fallback;
    echo_[key] = os.str();
    return fallback;
  }
  const std::string s = raw(key, "");
  echo_[key] = s;
  const double v = parse_real(s, key);
  if (!std::isfinite(v)) throw ConfigError(key + ": value must be finite");
  return v;
}

int Params::integer(const std::string& key, int fallback) {
  const std::string s = raw(key, std::to_string(fallback));
  echo_[key] = s;
  return parse_int<int>(trim(s), key);
}

std::uint64_t Params::u64(const std::string& key, std::uint64_t fallback) {
  const std::string s = raw(key, std::to_string(fallback));
  echo_[key] = s;
  return parse_int<std::uint64_t>(trim(s), key);
}

std::string Params::text(const std::string& key, const std::string& fallback) {
  const std::string s = raw(key, fallback);
  echo_[key] = s;
  return s;
}

std::vector<double> Params::reals(const std::string& key, const std::vector<double>& fallback) {
  if (!has(key)) {
    used_.insert(key);
    std::vector<std::string> items;
    for (double x : fallback) {
      std::ostringstream os;
      os.precision(17);
      os << x;
      items.push_back(os.str());
    }
    echo_[key] = join(items);
    return fallback;
  }
  const std::string s = raw(key, "");
  echo_[key] = s;
  std::vector<double> out;
  for (const std::string& item : split_list(s)) out.push_back(parse_real(item, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<int> Params::integers(const std::string& key, const std::vector<int>& fallback) {
  if (!has(key)) {
    used_.insert(key);
    std::vector<std::string> items;
    for (int x : fallback) items.push_back(std::to_string(x));
    echo_[key] = join(items);
    return fallback;
  }
  const std::string s = raw(key, "");
  echo_[key] = s;
  std::vector<int> out;
  for (const std::string& item : split_list(s)) out.push_back(parse_int<int>(item, key));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

void Params::reject_unused() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) throw ConfigError("unknown or inapplicable parameter '" + key + "'");
  }
}

}  // namespace qfb::cli
