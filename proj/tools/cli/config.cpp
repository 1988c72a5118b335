#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "extheat/errors.hpp"
#include "extheat/io.hpp"

namespace extheat::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_number(key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Config Config::from_ini(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(path.string() + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config cfg;
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      cfg.set(section, trim(node.data()));
      continue;
    }
    for (const auto& [key, leaf] : node) cfg.set(section + "." + key, trim(leaf.data()));
  }
  return cfg;
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  const std::string v = it == values_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

double Config::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  const double v = it == values_.end() ? fallback : parse_number(key, it->second);
  resolved_[key] = format_double(v);
  return v;
}

int Config::integer(const std::string& key, int fallback) const {
  const double v = number(key, fallback);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError("invalid integer for " + key + ": '" + resolved_[key] + "'");
  resolved_[key] = std::to_string(static_cast<int>(v));
  return static_cast<int>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  bool v = fallback;
  if (it != values_.end()) {
    const auto& s = it->second;
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
      v = true;
    } else if (s == "false" || s == "0" || s == "no" || s == "off") {
      v = false;
    } else {
      throw ConfigError("invalid boolean for " + key + ": '" + s + "'");
    }
  }
  resolved_[key] = v ? "true" : "false";
  return v;
}

std::vector<double> Config::numbers(const std::string& key, const std::string& fallback) const {
  return parse_list(key, text(key, fallback));
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!resolved_.count(k)) out.push_back(k);
  return out;
}

}  // namespace extheat::cli
