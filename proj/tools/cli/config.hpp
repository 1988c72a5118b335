#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace extheat::cli {

/// Flat "section.key" -> value store. Values come from an INI file and are
/// overridden by command-line flags. Every getter records the value it
/// resolved (including defaults) so the manifest shows the full configuration.
class Config {
 public:
  /// Throws ConfigError naming the path when the file is missing or malformed.
  static Config from_ini(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, const std::string& fallback) const;

  /// Keys that were set but never read; used to reject typos in files.
  std::vector<std::string> unused() const;

  const std::map<std::string, std::string>& resolved() const { return resolved_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> resolved_;
};

/// Strict parse of a finite double; throws ConfigError naming `key`.
double parse_number(const std::string& key, const std::string& text);
std::vector<double> parse_list(const std::string& key, const std::string& text);

}  // namespace extheat::cli
