#pragma once

#include <span>
#include <string>
#include <vector>

#include "extheat/grid.hpp"
#include "extheat/theta_heat.hpp"

namespace extheat {

enum class ProfileMethod { closed_form, elliptic_limit, parabolic_limit };

std::string to_string(ProfileMethod m);

/// Asymptotic profile samples on a grid plus fit diagnostics.
struct ProfileResult {
  ThetaBC theta{0.0};
  int dim = 3;
  RadialField samples;
  /// C* in Phi(r) = 1 - C* r^{2-N} (N >= 3); 0 for Neumann.
  double closed_form_coeff = 0.0;
  /// Fitted C with 1 - C r^{2-N} <= Phi, filled by profile_bounds_check.
  double bound_constant = 0.0;
  ProfileMethod method = ProfileMethod::closed_form;

  /// Largest radius where the samples are meaningful (R_{n-1} for the
  /// elliptic route, the monitoring window for the parabolic route).
  double valid_radius = 0.0;
  /// Largest pointwise increase seen along the limiting sequence (0 when the
  /// sequence is monotonically decreasing).
  double monotonicity_violation = 0.0;
  bool monotone = true;

  /// Radii (elliptic) or times (parabolic) of the limiting sequence and the
  /// corresponding iterates.
  std::vector<double> sequence;
  std::vector<RadialField> iterates;
};

/// C* = c a^{N-2} / (c + s (N-2)/a), from s(-Phi'(a)) + c Phi(a) = 0 with the
/// normal pointing into the hole. Zero for theta = 1.
double closed_form_coefficient(int dim, double hole_radius, ThetaBC theta);

/// Phi(r). For N = 2 the profile is 1 when theta = 1 and 0 otherwise.
double closed_form_value(int dim, double hole_radius, ThetaBC theta, double r);

ProfileResult closed_form_profile(GridPtr grid, ThetaBC theta);

/// Harmonic phi_R with the theta condition at a and phi_R(R) = 1, solved on
/// the grid truncated at the node nearest each R. For N >= 3 the final samples
/// are extrapolated in R^{2-N} from the two largest radii.
ProfileResult elliptic_profile(GridPtr grid, ThetaBC theta, std::span<const double> radii);

/// Single truncated harmonic solve; nodes beyond R hold 1.
RadialField truncated_harmonic(GridPtr grid, ThetaBC theta, double radius);

/// S^theta(t) 1 at increasing checkpoints, with monotone decrease monitored on
/// [a, window_radius]. The last iterate approximates Phi.
ProfileResult parabolic_profile(GridPtr grid, ThetaBC theta, std::span<const double> times,
                                const SolverParams& params, double window_radius);

struct ProfileBounds {
  double c_fit = 0.0;
  double gradient_exponent = 0.0;
  bool degenerate = false;
};

/// C_fit = max over nodes up to valid_radius of (1 - Phi) r^{N-2}, and the
/// log-log slope of |Phi'| evaluated at geometric cell midpoints on
/// [a, valid_radius / 4]. A constant profile is degenerate: C_fit = 0 and the
/// exponent is NaN.
ProfileBounds profile_bounds_check(ProfileResult& p);

}  // namespace extheat
