#include "extheat/freespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "extheat/errors.hpp"

namespace extheat {

namespace {

// exp(-60) relative to the peak: beyond this distance the kernel is dropped.
constexpr double kWindowExponent = 60.0;
// Angular cutoff: exp(-46) ~ 1e-20.
constexpr double kAngularExponent = 46.0;

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel time must be positive");
}

const GaussRule& panel_rule() {
  static const GaussRule rule = gauss_legendre(8);
  return rule;
}

const GaussRule& cell_rule() {
  static const GaussRule rule = gauss_legendre(4);
  return rule;
}

double integrate_window(const RingKernelTable& kernel, double r, double lo, double hi,
                        double max_panel, const GaussRule& rule) {
  const double t = kernel.time();
  const double reach = std::sqrt(4.0 * t * kWindowExponent);
  const double a = std::max({lo, r - reach, 0.0});
  const double b = std::min(hi, r + reach);
  if (!(b > a)) return 0.0;

  const int dim = kernel.dim();
  const double area = unit_sphere_area(dim);
  auto integrand = [&](double rho) { return kernel(r, rho) * area * std::pow(rho, dim - 1); };

  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_panel)));
  const double width = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double p_lo = a + width * static_cast<double>(k);
    sum += rule.integrate(integrand, p_lo, p_lo + width);
  }
  return sum;
}

}  // namespace

double gaussian_kernel(double d, double t, int dim) {
  check_time(t);
  return std::exp(-d * d / (4.0 * t)) / std::pow(4.0 * std::numbers::pi * t, 0.5 * dim);
}

RingKernelTable::RingKernelTable(int dim, double t, int angular_order, bool force_quadrature)
    : dim_(dim), t_(t), closed_form_(dim == 3 && !force_quadrature) {
  check_time(t);
  if (dim < 2) throw DomainError("ring kernel needs dim >= 2");
  prefactor_ = std::pow(4.0 * std::numbers::pi * t, -0.5 * dim);
  rule_ = gauss_legendre(angular_order);
  polar_normalizer_ = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (dim - 1)) / std::tgamma(0.5 * dim);
}

double RingKernelTable::angular_weight_sum() const {
  // S^{N-1} area = |S^{N-2}| * int_0^pi sin^{N-2}.
  const double lower_sphere = dim_ == 2 ? 2.0 : unit_sphere_area(dim_ - 1);
  const double integral = rule_.integrate(
      [&](double phi) { return std::pow(std::sin(phi), dim_ - 2); }, 0.0, std::numbers::pi);
  return lower_sphere * integral;
}

double RingKernelTable::angular_mean(double z) const {
  if (z == 0.0) return 1.0;
  if (closed_form_) {
    // (1 - e^{-2z}) / (2z), the image-difference formula.
    return z < 1e-8 ? 1.0 - z : -std::expm1(-2.0 * z) / (2.0 * z);
  }
  const double cut = kAngularExponent / z;
  const double phi_max = cut >= 2.0 ? std::numbers::pi : std::acos(1.0 - cut);
  const int k = dim_ - 2;
  auto integrand = [&](double phi) {
    const double half = std::sin(0.5 * phi);
    const double s = std::sin(phi);
    double sk = 1.0;
    for (int i = 0; i < k; ++i) sk *= s;
    return std::exp(-2.0 * z * half * half) * sk;
  };
  return rule_.integrate(integrand, 0.0, phi_max) / polar_normalizer_;
}

double RingKernelTable::operator()(double r, double rho) const {
  const double diff = r - rho;
  const double base = prefactor_ * std::exp(-diff * diff / (4.0 * t_));
  if (base == 0.0) return 0.0;
  return base * angular_mean(r * rho / (2.0 * t_));
}

double ring_kernel(double r, double rho, double t, int dim) {
  if (r < 0.0 || rho < 0.0) throw DomainError("ring kernel radii must be non-negative");
  return RingKernelTable(dim, t)(r, rho);
}

double ring_shell_integral(const RingKernelTable& kernel, double r, double lo, double hi,
                           int refine) {
  if (refine < 1) throw DomainError("quadrature refinement must be >= 1");
  const double max_panel = 0.5 * std::sqrt(kernel.time()) / refine;
  return integrate_window(kernel, r, lo, hi, max_panel, panel_rule());
}

double gaussian_ball_mass(double d, double radius, double t, int dim, int refine) {
  check_time(t);
  if (d < 0.0 || radius < 0.0) throw DomainError("ball mass needs non-negative radii");
  if (radius == 0.0) return 0.0;
  return std::clamp(ring_shell_integral(RingKernelTable(dim, t), d, 0.0, radius, refine), 0.0, 1.0);
}

double gaussian_ball_complement(double d, double radius, double t, int dim, int refine) {
  check_time(t);
  if (d < 0.0 || radius < 0.0) throw DomainError("ball mass needs non-negative radii");
  return std::clamp(ring_shell_integral(RingKernelTable(dim, t), d, radius, kInfinity, refine), 0.0,
                    1.0);
}

double gaussian_shell_mass(double d, double lo, double hi, double t, int dim, int refine) {
  check_time(t);
  if (!(hi > lo)) throw DomainError("shell mass needs lo < hi");
  if (d < 0.0 || lo < 0.0) throw DomainError("shell mass needs non-negative radii");
  return std::clamp(ring_shell_integral(RingKernelTable(dim, t), d, lo, hi, refine), 0.0, 1.0);
}

namespace {

double freespace_value_with(const RingKernelTable& kernel, const RadialField& u0, double r,
                            double tail) {
  const auto& grid = *u0.grid;
  const auto faces = grid.faces();
  const double t = kernel.time();
  const double reach = std::sqrt(4.0 * t * kWindowExponent);
  const double max_panel = 0.25 * std::sqrt(t);

  // Cells intersecting [r - reach, r + reach].
  const auto first_face = std::upper_bound(faces.begin(), faces.end(), r - reach);
  std::size_t i = first_face == faces.begin() ? 0 : static_cast<std::size_t>(first_face - faces.begin()) - 1;
  double sum = 0.0;
  for (; i < u0.size() && faces[i] < r + reach; ++i) {
    if (u0[i] == 0.0) continue;
    sum += u0[i] * integrate_window(kernel, r, faces[i], faces[i + 1], max_panel, cell_rule());
  }
  if (tail != 0.0) {
    sum += tail * ring_shell_integral(kernel, r, grid.outer_radius(), kInfinity);
  }
  return sum;
}

}  // namespace

double freespace_value(const RadialField& u0, double r, double t, double tail) {
  check_time(t);
  u0.validate();
  return freespace_value_with(RingKernelTable(u0.grid->dim(), t), u0, r, tail);
}

RadialField freespace_evolve_radial(const RadialField& u0, double t, double tail) {
  check_time(t);
  u0.validate();
  const RingKernelTable kernel(u0.grid->dim(), t);
  RadialField out = RadialField::zeros(u0.grid);
  out.time = u0.time + t;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = freespace_value_with(kernel, u0, u0.grid->node(j), tail);
  }
  return out;
}

double smoothing_exponent(int dim, double p, double q) {
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return -0.5 * dim * (inv_p - inv_q);
}

DecaySeries smoothing_exponent_check(const RadialField& f, double p, double q,
                                     std::span<const double> times) {
  if (times.empty()) throw DomainError("smoothing check needs at least one time");
  if (!(p >= 1.0) || !(q >= p)) throw DomainError("smoothing check needs 1 <= p <= q");
  DecaySeries series;
  for (double t : times) series.push(t, lp_norm(freespace_evolve_radial(f, t), q));
  if (series.size() >= 3) fit_in_place(series, {0, series.size()});
  return series;
}

}  // namespace extheat
