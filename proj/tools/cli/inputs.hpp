#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"
#include "extheat/grid.hpp"
#include "extheat/theta_heat.hpp"

namespace extheat::cli {

struct GridDefaults {
  double hole = 1.0;
  double outer = 1000.0;
  double first_width = 0.01;
  double stretch = 1.01;
};

/// domain.{dim,hole,outer,stretch} plus either domain.cells (explicit count)
/// or domain.first_width (count derived from the first cell width).
GridPtr build_grid(const Config& cfg, const GridDefaults& defaults);

SolverParams build_params(const Config& cfg);

ThetaBC build_theta(const Config& cfg);

struct InitialData {
  RadialField field;
  double tail = 0.0;
};

/// "zero", "ones", "shell:LO:HI", "source:RHO", "power:ALPHA[:CUTOFF]".
/// "ones" also sets a unit tail beyond the grid.
InitialData parse_initial_data(GridPtr grid, const std::string& key, const std::string& text);

/// "t1,t2,...", "dyadic:T0:KMAX" or "geom:T0:T1:COUNT".
std::vector<double> parse_times(const std::string& key, const std::string& text);

}  // namespace extheat::cli
