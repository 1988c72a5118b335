#include "extheat/theta_heat.hpp"

#include <algorithm>
#include <cmath>

#include "extheat/errors.hpp"
#include "extheat/freespace.hpp"
#include "extheat/profile.hpp"

namespace extheat {

std::string to_string(TimeScheme s) {
  return s == TimeScheme::backward_euler ? "backward_euler" : "crank_nicolson";
}

std::string to_string(OuterBC b) {
  return b == OuterBC::match_freespace ? "match_freespace" : "homogeneous_neumann";
}

TimeScheme parse_scheme(const std::string& s) {
  if (s == "backward_euler" || s == "be") return TimeScheme::backward_euler;
  if (s == "crank_nicolson" || s == "cn") return TimeScheme::crank_nicolson;
  throw ConfigError("solver.scheme: unknown scheme '" + s + "'");
}

OuterBC parse_outer_bc(const std::string& s) {
  if (s == "match_freespace") return OuterBC::match_freespace;
  if (s == "homogeneous_neumann" || s == "neumann") return OuterBC::homogeneous_neumann;
  throw ConfigError("solver.outer_bc: unknown outer boundary condition '" + s + "'");
}

void SolverParams::validate() const {
  if (!(dt_initial > 0.0)) throw ConfigError("solver.dt must be positive");
  if (!(dt_growth >= 1.0)) throw ConfigError("solver.dt_growth must be >= 1");
  if (!(tol_linear > 0.0)) throw ConfigError("solver.tol must be positive");
  if (!(contamination_threshold > 0.0)) throw ConfigError("solver.contamination must be positive");
}

double FarFieldReference::value(double r, double absolute_time) const {
  const double dt = absolute_time - initial.time;
  if (dt <= 0.0) {
    if (r >= initial.grid->outer_radius()) return tail;
    return initial.grid->interpolate(initial.values, r);
  }
  return freespace_value(initial, r, dt, tail);
}

std::vector<double> EvolutionTrace::times() const {
  std::vector<double> out;
  out.reserve(checkpoints.size());
  for (const auto& c : checkpoints) out.push_back(c.time);
  return out;
}

struct ThetaHeatSolver::Step {
  std::vector<double> lower, diag, upper, rhs, scratch;
};

ThetaHeatSolver::ThetaHeatSolver(GridPtr grid, ThetaBC theta, SolverParams params)
    : grid_(std::move(grid)), theta_(theta), params_(params) {
  if (!grid_) throw ConfigError("solver needs a grid");
  params_.validate();
}

double ThetaHeatSolver::hole_sink() const {
  if (!theta_.is_robin()) return 0.0;
  return grid_->area_at(grid_->hole_radius()) * theta_.robin_ratio();
}

std::vector<double> ThetaHeatSolver::apply_operator(std::span<const double> u) const {
  const auto n = grid_->size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double flux = grid_->transmissibility(i) * (u[i + 1] - u[i]);
    out[i] -= flux;
    out[i + 1] += flux;
  }
  out[0] += hole_sink() * u[0];
  return out;
}

double ThetaHeatSolver::boundary_flux(const RadialField& u) const {
  if (theta_.is_neumann()) return 0.0;
  if (theta_.is_dirichlet()) return -grid_->transmissibility(0) * (u[1] - u[0]);
  return -hole_sink() * u[0];
}

void ThetaHeatSolver::step(std::vector<double>& u, double dt, double outer_value, Step& w) const {
  const auto n = grid_->size();
  const auto wts = grid_->weights();
  const bool cn = params_.scheme == TimeScheme::crank_nicolson;
  const double implicit = cn ? 0.5 * dt : dt;

  w.lower.assign(n, 0.0);
  w.diag.assign(n, 0.0);
  w.upper.assign(n, 0.0);
  w.rhs.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    w.diag[i] = wts[i];
    w.rhs[i] = wts[i] * u[i];
  }
  if (cn) {
    const auto au = apply_operator(u);
    for (std::size_t i = 0; i < n; ++i) w.rhs[i] -= 0.5 * dt * au[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double k = implicit * grid_->transmissibility(i);
    w.diag[i] += k;
    w.diag[i + 1] += k;
    w.upper[i] = -k;
    w.lower[i + 1] = -k;
  }
  w.diag[0] += implicit * hole_sink();

  if (theta_.is_dirichlet()) {
    w.diag[0] = 1.0;
    w.upper[0] = 0.0;
    w.rhs[0] = 0.0;
  }
  if (params_.outer_bc == OuterBC::match_freespace) {
    w.diag[n - 1] = 1.0;
    w.lower[n - 1] = 0.0;
    w.rhs[n - 1] = outer_value;
  }

  // Thomas algorithm; the matrix is a diagonally dominant M-matrix.
  w.scratch.assign(n, 0.0);
  std::vector<double> x(n);
  double pivot = w.diag[0];
  if (pivot == 0.0) throw NumericalError("zero pivot in tridiagonal solve");
  x[0] = w.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    w.scratch[i] = w.upper[i - 1] / pivot;
    pivot = w.diag[i] - w.lower[i] * w.scratch[i];
    if (pivot == 0.0 || !std::isfinite(pivot)) throw NumericalError("zero pivot in tridiagonal solve");
    x[i] = (w.rhs[i] - w.lower[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= w.scratch[i + 1] * x[i + 1];

  double res = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ax = w.diag[i] * x[i];
    if (i > 0) ax += w.lower[i] * x[i - 1];
    if (i + 1 < n) ax += w.upper[i] * x[i + 1];
    res = std::max(res, std::abs(ax - w.rhs[i]));
    scale = std::max(scale, std::abs(w.diag[i] * x[i]) + std::abs(w.rhs[i]));
  }
  if (!(res <= params_.tol_linear * scale + 1e-300))
    throw NumericalError("tridiagonal residual exceeds solver tolerance");
  u.swap(x);
}

EvolutionTrace ThetaHeatSolver::evolve_series(const RadialField& u0, std::span<const double> times,
                                              const std::optional<FarFieldReference>& far) const {
  u0.validate();
  if (u0.grid.get() != grid_.get() && u0.grid->size() != grid_->size())
    throw ConfigError("initial data lives on a different grid");
  if (times.empty()) throw DomainError("evolve_series needs at least one time");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double prev = k == 0 ? u0.time : times[k - 1];
    if (!(times[k] > prev)) throw DomainError("checkpoint times must be strictly increasing");
  }

  const FarFieldReference reference = far ? *far : FarFieldReference{u0, 0.0};
  const bool matched = params_.outer_bc == OuterBC::match_freespace;
  const auto n = grid_->size();

  std::vector<double> u = u0.values;
  if (theta_.is_dirichlet()) u[0] = 0.0;

  EvolutionTrace trace;
  Step work;
  double t = u0.time;
  double dt = params_.dt_initial;
  for (double target : times) {
    while (target - t > 1e-12 * target) {
      double h = std::min(dt, target - t);
      // Avoid a sliver step just before a checkpoint.
      if (target - t - h < 0.05 * h) h = target - t;
      const double next = (h == target - t) ? target : t + h;
      const double outer = matched ? reference.value(grid_->outer_radius(), next) : 0.0;
      step(u, h, outer, work);
      t = next;
      dt *= params_.dt_growth;
      ++trace.steps;
    }
    t = target;

    RadialField field{grid_, u, t};
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    double mismatch = 0.0;
    if (umax > 0.0) {
      const double r = grid_->node(n - 2);
      mismatch = std::abs(u[n - 2] - reference.value(r, t)) / umax;
    }
    trace.masses.push_back(omega_mass(field));
    trace.boundary_fluxes.push_back(boundary_flux(field));
    trace.outer_mismatch.push_back(mismatch);
    if (mismatch > params_.contamination_threshold) trace.contaminated = true;
    trace.checkpoints.push_back(std::move(field));
  }
  return trace;
}

Evolved ThetaHeatSolver::evolve(const RadialField& u0, double duration,
                                const std::optional<FarFieldReference>& far) const {
  if (!(duration > 0.0)) throw DomainError("evolve needs a positive duration");
  const double target = u0.time + duration;
  auto trace = evolve_series(u0, std::span<const double>(&target, 1), far);
  return Evolved{std::move(trace.checkpoints.back()), trace.outer_mismatch.back(), trace.contaminated};
}

Evolved evolve(const RadialField& u0, ThetaBC theta, double t_final, const SolverParams& params,
               double tail) {
  return ThetaHeatSolver(u0.grid, theta, params).evolve(u0, t_final, FarFieldReference{u0, tail});
}

EvolutionTrace evolve_series(const RadialField& u0, ThetaBC theta, std::span<const double> times,
                             const SolverParams& params, double tail) {
  return ThetaHeatSolver(u0.grid, theta, params).evolve_series(u0, times, FarFieldReference{u0, tail});
}

double discrete_selfadjointness_check(const RadialField& f, const RadialField& g, ThetaBC theta,
                                      double t, const SolverParams& params) {
  const ThetaHeatSolver solver(f.grid, theta, params);
  const auto sg = solver.evolve(g, t).field;
  const auto sf = solver.evolve(f, t).field;
  return std::abs(weighted_inner(f, sg) - weighted_inner(g, sf));
}

MonotonicityReport theta_monotonicity_check(const RadialField& u0, ThetaBC theta1, ThetaBC theta2,
                                            std::span<const double> times,
                                            const SolverParams& params) {
  if (theta1.theta() > theta2.theta()) throw DomainError("monotonicity check needs theta1 <= theta2");
  for (double v : u0.values) {
    if (v < 0.0) throw DomainError("monotonicity check needs non-negative data");
  }
  auto lo = evolve_series(u0, theta1, times, params);
  auto hi = evolve_series(u0, theta2, times, params);
  MonotonicityReport report;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double worst = 0.0;
    double gap = kInfinity;
    for (std::size_t i = 0; i < u0.size(); ++i) {
      const double d = lo.checkpoints[k][i] - hi.checkpoints[k][i];
      worst = std::max(worst, d);
      gap = std::min(gap, -d);
    }
    report.times.push_back(times[k]);
    report.violations.push_back(worst);
    report.min_gap.push_back(gap);
    report.max_violation = std::max(report.max_violation, worst);
  }
  report.lower = std::move(lo.checkpoints);
  report.upper = std::move(hi.checkpoints);
  return report;
}

DecaySeries lp_lq_smoothing_check(const RadialField& u0, ThetaBC theta, double p, double q,
                                  std::span<const double> times, const SolverParams& params) {
  if (!(p >= 1.0) || !(q >= p)) throw DomainError("smoothing check needs 1 <= p <= q");
  const double exponent = -smoothing_exponent(u0.grid->dim(), p, q);
  const auto trace = evolve_series(u0, theta, times, params);
  DecaySeries series;
  for (const auto& c : trace.checkpoints) {
    series.push(c.time, std::pow(c.time - u0.time, exponent) * lp_norm(c, q));
  }
  return series;
}

KernelComparison shell_kernel_comparison(GridPtr grid, double rho_src, ThetaBC theta,
                                         std::span<const double> times, const SolverParams& params) {
  if (grid->dim() < 3) throw DomainError("kernel comparison is only informative for dim >= 3");
  const auto u0 = RadialField::sphere_source(grid, rho_src);
  const double rho = grid->node(grid->nearest(rho_src));
  const auto trace = evolve_series(u0, theta, times, params);

  const double a = grid->hole_radius();
  const double dirichlet_profile = closed_form_value(grid->dim(), a, ThetaBC(0.0), rho);
  const auto faces = grid->faces();

  KernelComparison out;
  out.source_radius = rho;
  out.worst_margin = kInfinity;
  for (const auto& c : trace.checkpoints) {
    const RingKernelTable kernel(grid->dim(), c.time);
    double distance = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double free_mass = ring_shell_integral(kernel, rho, faces[i], faces[i + 1]);
      distance += std::abs(grid->weight(i) * c[i] - free_mass);
    }
    const double bound =
        2.0 * (1.0 - dirichlet_profile) + gaussian_ball_mass(rho, a, c.time, grid->dim());
    out.distance.push(c.time, distance);
    out.bounds.push_back(bound);
    out.worst_margin = std::min(out.worst_margin, bound - distance);
    if (distance > bound) out.within_bound = false;
  }
  return out;
}

}  // namespace extheat
