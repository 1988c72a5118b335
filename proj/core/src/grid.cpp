#include "extheat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "extheat/errors.hpp"

namespace extheat {

namespace {

// hi^n - lo^n without cancellation for thin shells.
double power_difference(double lo, double hi, int n) {
  if (lo <= 0.0) return std::pow(hi, n);
  return std::pow(lo, n) * std::expm1(n * std::log1p((hi - lo) / lo));
}

}  // namespace

void DomainSpec::validate() const {
  if (dim < 2) throw ConfigError("domain.dim must be >= 2, got " + std::to_string(dim));
  if (!(hole_radius > 0.0) || !std::isfinite(hole_radius))
    throw ConfigError("domain.hole must be a positive radius");
  if (!(outer_radius > hole_radius) || !std::isfinite(outer_radius))
    throw ConfigError("domain.outer must exceed domain.hole");
  if (n_cells < 16) throw ConfigError("domain.cells must be >= 16, got " + std::to_string(n_cells));
  if (!(stretch >= 1.0) || !std::isfinite(stretch))
    throw ConfigError("domain.stretch must be >= 1");
}

DomainSpec stretched_domain(int dim, double hole_radius, double outer_radius, double first_width,
                            double stretch) {
  if (!(first_width > 0.0)) throw ConfigError("first cell width must be positive");
  const double length = outer_radius - hole_radius;
  double cells = 0.0;
  if (stretch == 1.0) {
    cells = std::ceil(length / first_width);
  } else {
    cells = std::ceil(std::log1p(length * (stretch - 1.0) / first_width) / std::log(stretch));
  }
  DomainSpec spec{dim, hole_radius, outer_radius, std::max(16, static_cast<int>(cells)), stretch};
  spec.validate();
  return spec;
}

ThetaBC::ThetaBC(double theta) : theta_(theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0,1]");
  // Exact zeros at the endpoints so Dirichlet/Neumann are not perturbed by rounding.
  s_ = theta == 0.0 ? 0.0 : (theta == 1.0 ? 1.0 : std::sin(0.5 * std::numbers::pi * theta));
  c_ = theta == 1.0 ? 0.0 : (theta == 0.0 ? 1.0 : std::cos(0.5 * std::numbers::pi * theta));
}

double ThetaBC::robin_ratio() const {
  if (is_dirichlet()) return std::numeric_limits<double>::infinity();
  return c_ / s_;
}

double unit_sphere_area(int dim) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

RadialGrid::RadialGrid(const DomainSpec& spec) : spec_(spec) {
  spec_.validate();
  sphere_area_ = unit_sphere_area(spec_.dim);

  const auto m = static_cast<std::size_t>(spec_.n_cells);
  const double a = spec_.hole_radius;
  const double length = spec_.outer_radius - a;
  const double g = spec_.stretch;

  nodes_.resize(m + 1);
  nodes_[0] = a;
  const double h0 = g == 1.0 ? length / static_cast<double>(m)
                             : length * (g - 1.0) / std::expm1(static_cast<double>(m) * std::log(g));
  double h = h0;
  for (std::size_t i = 1; i <= m; ++i) {
    nodes_[i] = nodes_[i - 1] + h;
    h *= g;
  }
  nodes_[m] = spec_.outer_radius;
  for (std::size_t i = 1; i <= m; ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw ConfigError("grid nodes are not strictly increasing");
  }

  faces_.resize(m + 2);
  faces_[0] = a;
  for (std::size_t i = 1; i <= m; ++i) faces_[i] = 0.5 * (nodes_[i - 1] + nodes_[i]);
  faces_[m + 1] = spec_.outer_radius;

  weights_.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) weights_[i] = shell_volume(faces_[i], faces_[i + 1]);

  transmissibility_.resize(m);
  const int n = spec_.dim;
  for (std::size_t i = 0; i < m; ++i) {
    const double r1 = nodes_[i];
    const double ratio = (nodes_[i + 1] - r1) / r1;
    double resistance = 0.0;
    if (n == 2) {
      resistance = std::log1p(ratio) / sphere_area_;
    } else {
      resistance = -std::pow(r1, 2 - n) * std::expm1((2 - n) * std::log1p(ratio)) /
                   ((n - 2) * sphere_area_);
    }
    transmissibility_[i] = 1.0 / resistance;
  }
}

double RadialGrid::area_at(double r) const { return sphere_area_ * std::pow(r, spec_.dim - 1); }

double RadialGrid::shell_volume(double lo, double hi) const {
  return sphere_area_ / spec_.dim * power_difference(lo, hi, spec_.dim);
}

std::size_t RadialGrid::nearest(double r) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), r);
  if (it == nodes_.begin()) return 0;
  if (it == nodes_.end()) return nodes_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - nodes_.begin());
  return (r - nodes_[hi - 1] <= nodes_[hi] - r) ? hi - 1 : hi;
}

double RadialGrid::interpolate(std::span<const double> values, double r) const {
  if (r <= nodes_.front()) return values.front();
  if (r >= nodes_.back()) return values.back();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  const auto hi = static_cast<std::size_t>(it - nodes_.begin());
  const double lam = (r - nodes_[hi - 1]) / (nodes_[hi] - nodes_[hi - 1]);
  return (1.0 - lam) * values[hi - 1] + lam * values[hi];
}

GridPtr make_radial_grid(const DomainSpec& spec) { return std::make_shared<const RadialGrid>(spec); }

void RadialField::validate() const {
  if (!grid) throw ConfigError("field has no grid");
  if (values.size() != grid->size()) throw ConfigError("field length does not match grid");
  for (double v : values) {
    if (!std::isfinite(v)) throw ConfigError("field contains a non-finite value");
  }
  if (!(time >= 0.0)) throw ConfigError("field time must be non-negative");
}

RadialField RadialField::zeros(GridPtr grid) { return constant(std::move(grid), 0.0); }

RadialField RadialField::constant(GridPtr grid, double value) {
  const auto n = grid->size();
  return RadialField{std::move(grid), std::vector<double>(n, value), 0.0};
}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& f) {
  RadialField out = zeros(grid);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid->node(i));
  return out;
}

RadialField RadialField::shell_indicator(GridPtr grid, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("shell indicator needs lo < hi");
  RadialField out = zeros(grid);
  const auto faces = grid->faces();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double c_lo = std::max(lo, faces[i]);
    const double c_hi = std::min(hi, faces[i + 1]);
    if (c_hi > c_lo) out[i] = grid->shell_volume(c_lo, c_hi) / grid->weight(i);
  }
  return out;
}

RadialField RadialField::sphere_source(GridPtr grid, double rho) {
  if (!(rho > grid->hole_radius() && rho < grid->outer_radius()))
    throw DomainError("sphere source radius must lie inside the grid");
  RadialField out = zeros(grid);
  const auto k = grid->nearest(rho);
  out[k] = 1.0 / grid->weight(k);
  return out;
}

}  // namespace extheat
