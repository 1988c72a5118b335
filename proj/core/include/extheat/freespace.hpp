#pragma once

#include <span>
#include <vector>

#include "extheat/grid.hpp"
#include "extheat/norms.hpp"
#include "extheat/quadrature.hpp"

namespace extheat {

/// Heat kernel of R^N at distance d: exp(-d^2/4t) / (4 pi t)^{N/2}.
double gaussian_kernel(double d, double t, int dim);

/// Sphere average of the Gaussian kernel,
///   K_N(r, rho, t) = mean over |w| = 1 of G(|r e_1 - rho w|, t),
/// for a fixed dimension and time. N = 3 uses the image-difference closed
/// form; other dimensions integrate over the polar angle with a Gauss rule
/// restricted to the angular window where the integrand is not negligible.
/// Immutable after construction.
class RingKernelTable {
 public:
  RingKernelTable(int dim, double t, int angular_order = 32, bool force_quadrature = false);

  int dim() const { return dim_; }
  double time() const { return t_; }

  double operator()(double r, double rho) const;

  /// Sum of the full-circle angular weights times the area of S^{N-2};
  /// equals the area of S^{N-1} when the rule integrates constants exactly.
  double angular_weight_sum() const;

 private:
  double angular_mean(double z) const;

  int dim_;
  double t_;
  double prefactor_;
  bool closed_form_;
  GaussRule rule_;
  double polar_normalizer_;  // integral of sin^{N-2} over [0, pi]
};

/// Convenience wrapper around RingKernelTable for a single evaluation.
double ring_kernel(double r, double rho, double t, int dim);

/// Integral of K_N(r, rho, t) |S^{N-1}| rho^{N-1} over lo < rho < hi, i.e.
/// the Gaussian mass that a point at distance r sees in that shell. `refine`
/// scales the panel density (2 = doubled resolution).
double ring_shell_integral(const RingKernelTable& kernel, double r, double lo, double hi,
                           int refine = 1);

/// Integral of G(x0 - y, t) over |y| < R with |x0| = d.
double gaussian_ball_mass(double d, double radius, double t, int dim, int refine = 1);
/// Integral of G(x0 - y, t) over |y| > R, computed directly (not as 1 - mass).
double gaussian_ball_complement(double d, double radius, double t, int dim, int refine = 1);
/// Integral of G(x0 - y, t) over lo < |y| < hi (hi may be infinite).
double gaussian_shell_mass(double d, double lo, double hi, double t, int dim, int refine = 1);

/// Whole-space evolution of radial data at a single radius. Nodal values are
/// read as cell averages on the dual cells, the region r < a is zero and the
/// region r > R_out holds the constant `tail`.
double freespace_value(const RadialField& u0, double r, double t, double tail = 0.0);

/// freespace_value at every grid node; the result carries time u0.time + t.
RadialField freespace_evolve_radial(const RadialField& u0, double t, double tail = 0.0);

/// Series t -> ||G(t) * f||_q over the grid, with a log-log fit over all samples.
/// `p` documents the integrability class of f; it enters only the reference
/// exponent -(N/2)(1/p - 1/q) returned by smoothing_exponent().
DecaySeries smoothing_exponent_check(const RadialField& f, double p, double q,
                                     std::span<const double> times);

/// -(N/2)(1/p - 1/q), with 1/inf = 0.
double smoothing_exponent(int dim, double p, double q);

}  // namespace extheat
