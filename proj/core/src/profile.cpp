#include "extheat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extheat/errors.hpp"
#include "extheat/norms.hpp"

namespace extheat {

std::string to_string(ProfileMethod m) {
  switch (m) {
    case ProfileMethod::closed_form: return "closed_form";
    case ProfileMethod::elliptic_limit: return "elliptic_limit";
    case ProfileMethod::parabolic_limit: return "parabolic_limit";
  }
  return "unknown";
}

double closed_form_coefficient(int dim, double hole_radius, ThetaBC theta) {
  if (theta.is_neumann() || dim < 3) return 0.0;
  const double s = theta.sin_coeff(), c = theta.cos_coeff();
  return c * std::pow(hole_radius, dim - 2) / (c + s * (dim - 2) / hole_radius);
}

double closed_form_value(int dim, double hole_radius, ThetaBC theta, double r) {
  if (theta.is_neumann()) return 1.0;
  if (dim < 3) return 0.0;
  return 1.0 - closed_form_coefficient(dim, hole_radius, theta) * std::pow(r, 2 - dim);
}

ProfileResult closed_form_profile(GridPtr grid, ThetaBC theta) {
  ProfileResult out;
  out.theta = theta;
  out.dim = grid->dim();
  out.method = ProfileMethod::closed_form;
  out.closed_form_coeff = closed_form_coefficient(grid->dim(), grid->hole_radius(), theta);
  out.samples = RadialField::sample(grid, [&](double r) {
    return closed_form_value(grid->dim(), grid->hole_radius(), theta, r);
  });
  out.valid_radius = grid->outer_radius();
  return out;
}

RadialField truncated_harmonic(GridPtr grid, ThetaBC theta, double radius) {
  const std::size_t k = grid->nearest(radius);
  if (k < 2) throw DomainError("truncation radius too close to the hole");
  RadialField out = RadialField::constant(grid, 1.0);
  if (theta.is_neumann()) return out;

  // Steady balance T_{i-1}(u_{i-1} - u_i) + T_i(u_{i+1} - u_i) = 0 on 0..k-1,
  // with the hole condition in row 0 and u_k = 1.
  const std::size_t n = k;  // unknowns 0..k-1
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t_right = grid->transmissibility(i);
    diag[i] += t_right;
    if (i + 1 < n) {
      upper[i] = -t_right;
    } else {
      rhs[i] += t_right;  // u_k = 1
    }
    if (i > 0) {
      const double t_left = grid->transmissibility(i - 1);
      diag[i] += t_left;
      lower[i] = -t_left;
    }
  }
  if (theta.is_dirichlet()) {
    diag[0] = 1.0;
    upper[0] = 0.0;
    rhs[0] = 0.0;
  } else {
    diag[0] += grid->area_at(grid->hole_radius()) * theta.robin_ratio();
  }

  std::vector<double> c(n, 0.0), x(n, 0.0);
  double pivot = diag[0];
  x[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    c[i] = upper[i - 1] / pivot;
    pivot = diag[i] - lower[i] * c[i];
    if (pivot == 0.0) throw NumericalError("singular harmonic system");
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i + 1] * x[i + 1];
  std::copy(x.begin(), x.end(), out.values.begin());
  return out;
}

ProfileResult elliptic_profile(GridPtr grid, ThetaBC theta, std::span<const double> radii) {
  if (radii.size() < 2) throw DomainError("elliptic profile needs at least two radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] > grid->outer_radius() * (1.0 + 1e-12))
      throw DomainError("elliptic profile radius beyond the grid");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw DomainError("elliptic radii must increase");
  }

  ProfileResult out;
  out.theta = theta;
  out.dim = grid->dim();
  out.method = ProfileMethod::elliptic_limit;
  out.closed_form_coeff = closed_form_coefficient(grid->dim(), grid->hole_radius(), theta);

  for (double r : radii) {
    out.iterates.push_back(truncated_harmonic(grid, theta, r));
    out.sequence.push_back(grid->node(grid->nearest(r)));
  }
  for (std::size_t k = 1; k < out.iterates.size(); ++k) {
    const auto& prev = out.iterates[k - 1];
    const auto& next = out.iterates[k];
    for (std::size_t i = 0; i < grid->size() && grid->node(i) <= out.sequence[k - 1]; ++i) {
      out.monotonicity_violation = std::max(out.monotonicity_violation, next[i] - prev[i]);
    }
  }
  out.monotone = out.monotonicity_violation <= 1e-12;

  const auto last = out.iterates.size() - 1;
  out.samples = out.iterates[last];
  out.valid_radius = out.sequence[last];
  if (grid->dim() >= 3 && !theta.is_neumann()) {
    const double r1 = out.sequence[last - 1], r2 = out.sequence[last];
    const double e1 = std::pow(r1, 2 - grid->dim()), e2 = std::pow(r2, 2 - grid->dim());
    const auto& p1 = out.iterates[last - 1];
    const auto& p2 = out.iterates[last];
    for (std::size_t i = 0; i < grid->size() && grid->node(i) <= r1; ++i) {
      out.samples[i] = (e1 * p2[i] - e2 * p1[i]) / (e1 - e2);
    }
    out.valid_radius = r1;
  }
  return out;
}

ProfileResult parabolic_profile(GridPtr grid, ThetaBC theta, std::span<const double> times,
                                const SolverParams& params, double window_radius) {
  ProfileResult out;
  out.theta = theta;
  out.dim = grid->dim();
  out.method = ProfileMethod::parabolic_limit;
  out.closed_form_coeff = closed_form_coefficient(grid->dim(), grid->hole_radius(), theta);
  out.valid_radius = std::min(window_radius, grid->outer_radius());

  const auto ones = RadialField::constant(grid, 1.0);
  auto trace = evolve_series(ones, theta, times, params, /*tail=*/1.0);

  const RadialField* prev = &ones;
  for (const auto& c : trace.checkpoints) {
    for (std::size_t i = 0; i < grid->size() && grid->node(i) <= out.valid_radius; ++i) {
      out.monotonicity_violation = std::max(out.monotonicity_violation, c[i] - (*prev)[i]);
    }
    prev = &c;
  }
  out.monotone = out.monotonicity_violation <= 1e-10;
  out.sequence.assign(times.begin(), times.end());
  out.samples = trace.checkpoints.back();
  out.iterates = std::move(trace.checkpoints);
  return out;
}

ProfileBounds profile_bounds_check(ProfileResult& p) {
  const auto& f = p.samples;
  const auto& grid = *f.grid;
  ProfileBounds out;

  bool constant_one = true;
  for (double v : f.values) {
    if (std::abs(1.0 - v) > 1e-13) constant_one = false;
  }
  if (constant_one) {
    out.degenerate = true;
    out.gradient_exponent = std::numeric_limits<double>::quiet_NaN();
    p.bound_constant = 0.0;
    return out;
  }

  const int n = grid.dim();
  for (std::size_t i = 0; i < f.size() && grid.node(i) <= p.valid_radius; ++i) {
    out.c_fit = std::max(out.c_fit, (1.0 - f[i]) * std::pow(grid.node(i), n - 2));
  }
  p.bound_constant = out.c_fit;

  DecaySeries gradient;
  for (std::size_t i = 0; i + 1 < f.size() && grid.node(i + 1) <= 0.25 * p.valid_radius; ++i) {
    const double slope = (f[i + 1] - f[i]) / (grid.node(i + 1) - grid.node(i));
    if (std::abs(slope) > 0.0) gradient.push(std::sqrt(grid.node(i) * grid.node(i + 1)), std::abs(slope));
  }
  if (gradient.size() < 3) throw DomainError("too few nodes to fit the profile gradient");
  out.gradient_exponent = fit_in_place(gradient, {0, gradient.size()}).slope;
  return out;
}

}  // namespace extheat
