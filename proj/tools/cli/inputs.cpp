#include "cli/inputs.hpp"

#include <cmath>

#include "extheat/asymptotics.hpp"
#include "extheat/errors.hpp"

namespace extheat::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

GridPtr build_grid(const Config& cfg, const GridDefaults& defaults) {
  const int dim = cfg.integer("domain.dim", 3);
  const double hole = cfg.number("domain.hole", defaults.hole);
  const double outer = cfg.number("domain.outer", defaults.outer);
  const double stretch = cfg.number("domain.stretch", defaults.stretch);
  DomainSpec spec;
  if (cfg.has("domain.cells")) {
    spec = {dim, hole, outer, cfg.integer("domain.cells", 16), stretch};
  } else {
    const double width = cfg.number("domain.first_width", defaults.first_width);
    if (!(width > 0.0)) throw ConfigError("domain.first_width must be positive");
    if (!(outer > hole) || !(hole > 0.0)) spec = {dim, hole, outer, 16, stretch};
    else spec = stretched_domain(dim, hole, outer, width, stretch);
  }
  spec.validate();
  return make_radial_grid(spec);
}

SolverParams build_params(const Config& cfg) {
  SolverParams p;
  p.dt_initial = cfg.number("solver.dt", 1e-3);
  p.dt_growth = cfg.number("solver.dt_growth", 1.01);
  p.scheme = parse_scheme(cfg.text("solver.scheme", to_string(p.scheme)));
  p.outer_bc = parse_outer_bc(cfg.text("solver.outer_bc", to_string(p.outer_bc)));
  p.tol_linear = cfg.number("solver.tol", p.tol_linear);
  p.contamination_threshold = cfg.number("solver.contamination", p.contamination_threshold);
  p.validate();
  return p;
}

ThetaBC build_theta(const Config& cfg) {
  const double theta = cfg.number("bc.theta", 0.0);
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("bc.theta must lie in [0, 1]");
  return ThetaBC(theta);
}

InitialData parse_initial_data(GridPtr grid, const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  const auto& kind = parts[0];
  auto arg = [&](std::size_t i) { return parse_number(key, parts.at(i)); };
  auto expect = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw ConfigError("malformed " + key + ": '" + text + "'");
  };
  InitialData out;
  if (kind == "zero") {
    expect(1, 1);
    out.field = RadialField::zeros(grid);
  } else if (kind == "ones") {
    expect(1, 1);
    out.field = RadialField::constant(grid, 1.0);
    out.tail = 1.0;
  } else if (kind == "shell") {
    expect(3, 3);
    const double lo = arg(1), hi = arg(2);
    if (!(lo < hi) || lo < grid->hole_radius() || hi > grid->outer_radius())
      throw ConfigError(key + ": shell must satisfy hole <= lo < hi <= outer");
    out.field = RadialField::shell_indicator(grid, lo, hi);
  } else if (kind == "source") {
    expect(2, 2);
    const double rho = arg(1);
    if (rho < grid->hole_radius() || rho > grid->outer_radius())
      throw ConfigError(key + ": source radius outside the grid");
    out.field = RadialField::sphere_source(grid, rho);
  } else if (kind == "power") {
    expect(2, 3);
    const double alpha = arg(1);
    const double cutoff = parts.size() == 3 ? arg(2) : grid->outer_radius();
    out.field = RadialField::sample(grid, [&](double r) { return r <= cutoff ? std::pow(r, -alpha) : 0.0; });
  } else {
    throw ConfigError("unknown " + key + " kind '" + kind + "'");
  }
  return out;
}

std::vector<double> parse_times(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (text.rfind("dyadic:", 0) == 0) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("malformed " + key + ": '" + text + "'");
    const double k = parse_number(key, parts[2]);
    if (k != std::floor(k) || k < 0 || k > 200) throw ConfigError("invalid " + key + ": '" + text + "'");
    try {
      out = dyadic_times(parse_number(key, parts[1]), static_cast<int>(k));
    } catch (const DomainError&) {
      throw ConfigError("invalid " + key + ": '" + text + "'");
    }
  } else if (text.rfind("geom:", 0) == 0) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw ConfigError("malformed " + key + ": '" + text + "'");
    const double t0 = parse_number(key, parts[1]), t1 = parse_number(key, parts[2]);
    const double n = parse_number(key, parts[3]);
    if (!(t0 > 0.0 && t1 > t0) || n != std::floor(n) || n < 2 || n > 10000)
      throw ConfigError("invalid " + key + ": '" + text + "'");
    for (int k = 0; k < static_cast<int>(n); ++k) out.push_back(t0 * std::pow(t1 / t0, k / (n - 1.0)));
  } else {
    out = parse_list(key, text);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(out[k] > 0.0) || (k > 0 && !(out[k] > out[k - 1])))
      throw ConfigError(key + " must be positive and strictly increasing");
  }
  if (out.empty()) throw ConfigError(key + " is empty");
  return out;
}

}  // namespace extheat::cli
