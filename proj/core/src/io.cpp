#include "extheat/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "extheat/errors.hpp"

namespace extheat {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::initializer_list<double> values) {
  add_row(std::vector<double>(values));
}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) throw ConfigError("CSV row width does not match header");
  rows_.push_back(values);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) {
    if (k) out += ',';
    out += header_[k];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << str();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void to_json(nlohmann::json& j, const DomainSpec& s) {
  j = {{"dim", s.dim},
       {"hole", s.hole_radius},
       {"outer", s.outer_radius},
       {"cells", s.n_cells},
       {"stretch", s.stretch}};
}

void from_json(const nlohmann::json& j, DomainSpec& s) {
  s.dim = j.at("dim").get<int>();
  s.hole_radius = j.at("hole").get<double>();
  s.outer_radius = j.at("outer").get<double>();
  s.n_cells = j.at("cells").get<int>();
  s.stretch = j.at("stretch").get<double>();
}

void to_json(nlohmann::json& j, const SolverParams& p) {
  j = {{"dt", p.dt_initial},
       {"dt_growth", p.dt_growth},
       {"scheme", to_string(p.scheme)},
       {"outer_bc", to_string(p.outer_bc)},
       {"tol", p.tol_linear},
       {"contamination", p.contamination_threshold}};
}

void from_json(const nlohmann::json& j, SolverParams& p) {
  p.dt_initial = j.at("dt").get<double>();
  p.dt_growth = j.at("dt_growth").get<double>();
  p.scheme = parse_scheme(j.at("scheme").get<std::string>());
  p.outer_bc = parse_outer_bc(j.at("outer_bc").get<std::string>());
  p.tol_linear = j.at("tol").get<double>();
  p.contamination_threshold = j.value("contamination", 1e-2);
}

void to_json(nlohmann::json& j, const DecaySeries& s) {
  j = {{"times", s.times}, {"values", s.values}, {"fitted_slope", s.fitted_slope}, {"fit_r2", s.fit_r2}};
}

CsvTable profile_table(const ProfileResult& p) {
  CsvTable table({"r", "phi", "lower_bound"});
  const auto& grid = *p.samples.grid;
  for (std::size_t i = 0; i < p.samples.size(); ++i) {
    const double r = grid.node(i);
    const double lower = p.dim >= 3 ? 1.0 - p.bound_constant * std::pow(r, 2 - p.dim) : 0.0;
    table.add_row({r, p.samples[i], lower});
  }
  return table;
}

CsvTable checkpoint_table(const EvolutionTrace& trace) {
  CsvTable table({"t", "r", "u"});
  for (const auto& c : trace.checkpoints) {
    for (std::size_t i = 0; i < c.size(); ++i) table.add_row({c.time, c.grid->node(i), c[i]});
  }
  return table;
}

nlohmann::json evolution_manifest(const RadialGrid& grid, ThetaBC theta, const SolverParams& params,
                                  const EvolutionTrace& trace) {
  return {{"grid", grid.spec()},
          {"nodes", grid.size()},
          {"theta", theta.theta()},
          {"scheme", to_string(params.scheme)},
          {"outer_bc", to_string(params.outer_bc)},
          {"params", params},
          {"times", trace.times()},
          {"masses", trace.masses},
          {"boundary_fluxes", trace.boundary_fluxes},
          {"outer_mismatch", trace.outer_mismatch},
          {"contaminated", trace.contaminated},
          {"steps", trace.steps}};
}

}  // namespace extheat
