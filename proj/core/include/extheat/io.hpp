#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "extheat/grid.hpp"
#include "extheat/norms.hpp"
#include "extheat/profile.hpp"
#include "extheat/theta_heat.hpp"

namespace extheat {

/// 17 significant digits; round-trips every double.
std::string format_double(double v);

/// Comma-separated table with a header row. Rows are buffered and written on
/// save(), so a failed run leaves no partial file.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::initializer_list<double> values);
  void add_row(const std::vector<double>& values);

  std::string str() const;
  void save(const std::filesystem::path& path) const;

  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// FNV-1a 64-bit hash as 16 hex digits.
std::string digest(const std::string& text);

void to_json(nlohmann::json& j, const DomainSpec& s);
void from_json(const nlohmann::json& j, DomainSpec& s);
void to_json(nlohmann::json& j, const SolverParams& p);
void from_json(const nlohmann::json& j, SolverParams& p);
void to_json(nlohmann::json& j, const DecaySeries& s);

/// Columns r, phi, lower_bound where lower_bound = 1 - C_fit / r^{N-2}.
CsvTable profile_table(const ProfileResult& p);

/// Columns t, r, u for every checkpoint and node.
CsvTable checkpoint_table(const EvolutionTrace& trace);

/// Run manifest for an evolution: parameters, grid, theta and mass series.
nlohmann::json evolution_manifest(const RadialGrid& grid, ThetaBC theta, const SolverParams& params,
                                  const EvolutionTrace& trace);

}  // namespace extheat
