#include "extheat/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "extheat/errors.hpp"

namespace extheat {

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0)) throw DomainError("norm exponent must satisfy p >= 1");
}

}  // namespace

double lp_norm(const RadialField& f, double p) {
  check_exponent(p);
  const auto w = f.grid->weights();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  // Scale by the max so large p does not overflow.
  double scale = 0.0;
  for (double v : f.values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * std::pow(std::abs(f[i]) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

double weak_lp_quasinorm(const RadialField& f, double p) {
  check_exponent(p);
  const auto w = f.grid->weights();
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::abs(f[i]) > std::abs(f[j]); });

  // Levels just below |u_k| see every node with |u| >= |u_k|.
  double best = 0.0;
  double measure = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    const double level = std::abs(f[order[k]]);
    if (level == 0.0) break;
    while (k < order.size() && std::abs(f[order[k]]) == level) measure += w[order[k++]];
    if (std::isinf(p)) {
      best = std::max(best, level);
    } else {
      best = std::max(best, level * std::pow(measure, 1.0 / p));
    }
  }
  return best;
}

double omega_mass(const RadialField& f) {
  const auto w = f.grid->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
  return sum;
}

double weighted_inner(const RadialField& f, const RadialField& g) {
  if (f.size() != g.size()) throw ConfigError("inner product of fields on different grids");
  const auto w = f.grid->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i] * g[i];
  return sum;
}

PowerFit fit_decay_exponent(const DecaySeries& s, IndexRange window) {
  if (window.last > s.size() || window.first >= window.last || window.size() < 3)
    throw DomainError("decay fit needs a window of at least 3 samples");
  const auto n = static_cast<double>(window.size());
  double sx = 0.0, sy = 0.0;
  for (auto i = window.first; i < window.last; ++i) {
    if (!(s.values[i] > 0.0) || !(s.times[i] > 0.0))
      throw DomainError("decay fit needs positive times and values");
    sx += std::log(s.times[i]);
    sy += std::log(s.values[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto i = window.first; i < window.last; ++i) {
    const double dx = std::log(s.times[i]) - mx;
    const double dy = std::log(s.values[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("decay fit needs distinct times");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

IndexRange last_decade(const DecaySeries& s) {
  if (s.size() == 0) return {};
  const double cut = s.times.back() / 10.0 * (1.0 - 1e-12);
  std::size_t first = s.size() - 1;
  while (first > 0 && s.times[first - 1] >= cut) --first;
  return {first, s.size()};
}

PowerFit fit_in_place(DecaySeries& s, IndexRange window) {
  const auto fit = fit_decay_exponent(s, window);
  s.fitted_slope = fit.slope;
  s.fit_r2 = fit.r2;
  return fit;
}

}  // namespace extheat
