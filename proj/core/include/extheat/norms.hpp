#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "extheat/grid.hpp"

namespace extheat {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum_i w_i |u_i|^p)^{1/p}; p = kInfinity gives max_i |u_i|.
double lp_norm(const RadialField& f, double p);

/// Weak-L^p (Lorentz L^{p,inf}) quasinorm sup_l l * mu{|u| > l}^{1/p},
/// evaluated at the sample levels l = |u_i|.
double weak_lp_quasinorm(const RadialField& f, double p);

/// Integral of u over the truncated exterior domain.
double omega_mass(const RadialField& f);

/// Weighted inner product sum_i w_i f_i g_i.
double weighted_inner(const RadialField& f, const RadialField& g);

/// Time series of a decaying quantity plus its log-log fit.
struct DecaySeries {
  std::vector<double> times;
  std::vector<double> values;
  double fitted_slope = 0.0;
  double fit_r2 = 0.0;

  std::size_t size() const { return times.size(); }
  void push(double t, double v) {
    times.push_back(t);
    values.push_back(v);
  }
};

/// Half-open index window [first, last).
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first; }
};

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;  // log(value) at log(t) = 0
  double r2 = 0.0;
};

/// Least-squares fit of log(value) against log(time) on the window.
/// Throws DomainError if the window has fewer than 3 points or a
/// non-positive value.
PowerFit fit_decay_exponent(const DecaySeries& s, IndexRange window);

/// Indices of the samples with t >= t_last / 10.
IndexRange last_decade(const DecaySeries& s);

/// Fits over `window` and stores slope and r^2 into the series.
PowerFit fit_in_place(DecaySeries& s, IndexRange window);

}  // namespace extheat
