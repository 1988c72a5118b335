#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace extheat {

/// Exterior of the closed ball of radius `hole_radius` in R^dim, truncated at
/// `outer_radius`. Cell widths grow geometrically by `stretch` away from the hole.
struct DomainSpec {
  int dim = 3;
  double hole_radius = 1.0;
  double outer_radius = 2.0;
  int n_cells = 16;
  double stretch = 1.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Builds a DomainSpec whose first cell has width close to `first_width`
/// (the count is rounded up, so the actual first width is at most that).
DomainSpec stretched_domain(int dim, double hole_radius, double outer_radius,
                            double first_width, double stretch);

/// Boundary condition sin(pi theta/2) du/dn + cos(pi theta/2) u = 0 on the
/// hole, with n the outward normal of the exterior domain (pointing to the
/// origin). theta = 0 is Dirichlet, theta = 1 Neumann, anything between Robin.
class ThetaBC {
 public:
  explicit ThetaBC(double theta);

  double theta() const { return theta_; }
  double sin_coeff() const { return s_; }
  double cos_coeff() const { return c_; }

  bool is_dirichlet() const { return theta_ == 0.0; }
  bool is_neumann() const { return theta_ == 1.0; }
  bool is_robin() const { return !is_dirichlet() && !is_neumann(); }

  /// c/s: the Robin sink coefficient in du/dr(a) = (c/s) u(a). Zero for
  /// Neumann; infinite for Dirichlet.
  double robin_ratio() const;

 private:
  double theta_;
  double s_;
  double c_;
};

/// Area of the unit sphere S^{dim-1} in R^dim.
double unit_sphere_area(int dim);

/// Vertex-centred radial grid. Node i owns the dual cell
/// [face(i), face(i+1)], with face(0) = a, face(M+1) = R_out and interior
/// faces at node midpoints. Weights are the exact shell volumes of the dual
/// cells, so constants are integrated exactly.
class RadialGrid {
 public:
  explicit RadialGrid(const DomainSpec& spec);

  const DomainSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  double hole_radius() const { return spec_.hole_radius; }
  double outer_radius() const { return spec_.outer_radius; }

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  /// size() + 1 cell faces, faces()[0] = a and faces()[size()] = R_out.
  std::span<const double> faces() const { return faces_; }

  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  double sphere_area() const { return sphere_area_; }
  /// Area of the sphere of radius r.
  double area_at(double r) const;
  /// Volume of the shell lo < |x| < hi.
  double shell_volume(double lo, double hi) const;
  /// |B(0,R_out)| - |B(0,a)|.
  double volume() const { return shell_volume(hole_radius(), outer_radius()); }

  /// Conductance between nodes i and i+1 for the radial Laplacian:
  /// 1 / int_{r_i}^{r_{i+1}} dr / (area_at(r)). Exact for radial harmonics.
  double transmissibility(std::size_t i) const { return transmissibility_[i]; }

  /// Index of the node nearest to r.
  std::size_t nearest(double r) const;
  /// Piecewise-linear interpolation of nodal values at r (clamped).
  double interpolate(std::span<const double> values, double r) const;

 private:
  DomainSpec spec_;
  double sphere_area_;
  std::vector<double> nodes_;
  std::vector<double> faces_;
  std::vector<double> weights_;
  std::vector<double> transmissibility_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_radial_grid(const DomainSpec& spec);

/// Radial grid function u(r_i) at time `time`.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;
  double time = 0.0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  /// Throws ConfigError when the length mismatches or a value is not finite.
  void validate() const;

  static RadialField zeros(GridPtr grid);
  static RadialField constant(GridPtr grid, double value);
  static RadialField sample(GridPtr grid, const std::function<double(double)>& f);
  /// Cell-averaged indicator of lo <= |x| <= hi: each node holds the fraction
  /// of its dual cell volume inside the shell, so mass is exact.
  static RadialField shell_indicator(GridPtr grid, double lo, double hi);
  /// Unit-mass uniform density on the sphere |x| = rho, lumped onto the node
  /// nearest rho. The effective radius is grid->node(grid->nearest(rho)).
  static RadialField sphere_source(GridPtr grid, double rho);
};

}  // namespace extheat
