#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "extheat/grid.hpp"
#include "extheat/norms.hpp"

namespace extheat {

enum class TimeScheme { backward_euler, crank_nicolson };
enum class OuterBC { match_freespace, homogeneous_neumann };

std::string to_string(TimeScheme s);
std::string to_string(OuterBC b);
TimeScheme parse_scheme(const std::string& s);
OuterBC parse_outer_bc(const std::string& s);

struct SolverParams {
  double dt_initial = 1e-3;
  /// Steps grow as dt_k = dt_initial * dt_growth^k.
  double dt_growth = 1.0;
  TimeScheme scheme = TimeScheme::backward_euler;
  OuterBC outer_bc = OuterBC::match_freespace;
  /// Relative residual accepted from the tridiagonal solve.
  double tol_linear = 1e-10;
  /// Outer mismatch |u - u_free| / max|u| above which a run is flagged.
  double contamination_threshold = 1e-2;

  void validate() const;
};

/// Free-space data used to drive the outer boundary under match_freespace:
/// the whole-space evolution of `initial` (plus a constant `tail` beyond the
/// grid) evaluated at absolute time t - initial.time.
struct FarFieldReference {
  RadialField initial;
  double tail = 0.0;

  double value(double r, double absolute_time) const;
};

struct Evolved {
  RadialField field;
  /// |u - u_free| / max|u| at the node next to the outer boundary.
  double outer_mismatch = 0.0;
  bool contaminated = false;
};

struct EvolutionTrace {
  std::vector<RadialField> checkpoints;
  std::vector<double> masses;
  /// Integral over the hole surface of du/dn (n pointing into the hole).
  std::vector<double> boundary_fluxes;
  std::vector<double> outer_mismatch;
  bool contaminated = false;
  std::size_t steps = 0;

  std::vector<double> times() const;
};

/// Implicit finite-volume march for u_t = Laplacian(u) on a < r < R_out with
/// the theta condition at r = a. The spatial operator is the conservation-form
/// radial Laplacian with harmonic-exact conductances; the Robin condition
/// enters as a sink on the half cell at r = a.
class ThetaHeatSolver {
 public:
  ThetaHeatSolver(GridPtr grid, ThetaBC theta, SolverParams params);

  const RadialGrid& grid() const { return *grid_; }
  const ThetaBC& theta() const { return theta_; }
  const SolverParams& params() const { return params_; }

  /// March from u0.time to u0.time + duration.
  Evolved evolve(const RadialField& u0, double duration,
                 const std::optional<FarFieldReference>& far = std::nullopt) const;

  /// Checkpoints at the absolute times in `times` (strictly increasing, all
  /// greater than u0.time), continuing a single march.
  EvolutionTrace evolve_series(const RadialField& u0, std::span<const double> times,
                               const std::optional<FarFieldReference>& far = std::nullopt) const;

  /// Integral of du/dn over the hole surface for the current state, from the
  /// same stencil used to impose the boundary condition.
  double boundary_flux(const RadialField& u) const;

  /// Applies the discrete spatial operator: (A u)_i with w_i du_i/dt = -(A u)_i.
  std::vector<double> apply_operator(std::span<const double> u) const;

 private:
  struct Step;
  void step(std::vector<double>& u, double dt, double outer_value, Step& work) const;
  double hole_sink() const;

  GridPtr grid_;
  ThetaBC theta_;
  SolverParams params_;
};

Evolved evolve(const RadialField& u0, ThetaBC theta, double t_final, const SolverParams& params,
               double tail = 0.0);

EvolutionTrace evolve_series(const RadialField& u0, ThetaBC theta, std::span<const double> times,
                             const SolverParams& params, double tail = 0.0);

/// |<f, S(t) g>_w - <g, S(t) f>_w|.
double discrete_selfadjointness_check(const RadialField& f, const RadialField& g, ThetaBC theta,
                                      double t, const SolverParams& params);

struct MonotonicityReport {
  std::vector<double> times;
  /// max_i (S^{theta1} u0 - S^{theta2} u0)_i, clipped at 0, per checkpoint.
  std::vector<double> violations;
  double max_violation = 0.0;
  /// min_i (S^{theta2} u0 - S^{theta1} u0)_i per checkpoint (may be negative).
  std::vector<double> min_gap;
  std::vector<RadialField> lower;
  std::vector<RadialField> upper;
};

MonotonicityReport theta_monotonicity_check(const RadialField& u0, ThetaBC theta1, ThetaBC theta2,
                                            std::span<const double> times,
                                            const SolverParams& params);

/// Series t -> t^{(N/2)(1/p - 1/q)} ||S(t) u0||_q.
DecaySeries lp_lq_smoothing_check(const RadialField& u0, ThetaBC theta, double p, double q,
                                  std::span<const double> times, const SolverParams& params);

struct KernelComparison {
  double source_radius = 0.0;  // node actually used
  DecaySeries distance;        // D(t) = ||S^theta u0 - S_free u0||_{L^1}
  std::vector<double> bounds;  // 2(1 - Phi^0(rho)) + int_hole G
  bool within_bound = true;
  double worst_margin = 0.0;   // min over checkpoints of bound - D
};

/// L^1 distance between the exterior and free evolutions of a unit sphere
/// source at radius rho, against the sphere-averaged kernel comparison bound.
/// The free evolution is projected onto the dual cells so both sides live in
/// the same discrete space.
KernelComparison shell_kernel_comparison(GridPtr grid, double rho_src, ThetaBC theta,
                                         std::span<const double> times, const SolverParams& params);

}  // namespace extheat
