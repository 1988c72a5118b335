#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "extheat/errors.hpp"
#include "extheat/freespace.hpp"
#include "extheat/norms.hpp"
#include "oracles.hpp"

using namespace extheat;
using std::numbers::pi;

namespace {

// Uniform grid on [1, 2] with 16 cells: faces of node k sit at 1 + (k -+ 0.5)/16,
// so shells with those end points cover whole dual cells.
GridPtr unit_grid() { return make_radial_grid({3, 1.0, 2.0, 16, 1.0}); }

double face(int k) { return 1.0 + (k - 0.5) / 16.0; }

}  // namespace

TEST_CASE("lp norm of an exact cell indicator") {
  const auto g = unit_grid();
  const auto f = RadialField::shell_indicator(g, face(2), face(6));
  const double vol = g->shell_volume(face(2), face(6));
  for (double p : {1.0, 1.5, 2.0, 7.0})
    CHECK(lp_norm(f, p) == doctest::Approx(std::pow(vol, 1.0 / p)).epsilon(1e-13));
  CHECK(lp_norm(f, kInfinity) == 1.0);
  CHECK(lp_norm(RadialField::zeros(g), 2.0) == 0.0);
}

TEST_CASE("lp norm of 1/r in 3d") {
  // int_1^R 4 pi r^2 r^{-2} dr = 4 pi (R - 1)
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 11.0, 0.002, 1.0));
  const auto f = RadialField::sample(g, [](double r) { return 1.0 / r; });
  CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(4.0 * pi * 10.0)).epsilon(1e-6));
}

TEST_CASE("large exponents do not overflow") {
  const auto g = unit_grid();
  const auto f = RadialField::constant(g, 1e200);
  CHECK(std::isfinite(lp_norm(f, 4.0)));
  CHECK(lp_norm(f, 4.0) == doctest::Approx(1e200 * std::pow(g->volume(), 0.25)));
}

TEST_CASE("weak lp of a two-level step function") {
  const auto g = unit_grid();
  auto f = RadialField::shell_indicator(g, face(2), face(4));
  const auto rest = RadialField::shell_indicator(g, face(4), face(12));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 * f[i] + rest[i];
  const double va = g->shell_volume(face(2), face(4));
  const double vb = g->shell_volume(face(4), face(12));
  for (double p : {1.0, 2.0, 5.0}) {
    const double expect = std::max(2.0 * std::pow(va, 1.0 / p), std::pow(va + vb, 1.0 / p));
    CHECK(weak_lp_quasinorm(f, p) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(weak_lp_quasinorm(f, kInfinity) == 2.0);
}

TEST_CASE("weak l3/2 quasinorm of r^-2 in 3d") {
  // mu{r^-2 > l} = (4 pi / 3)(l^{-3/2} - 1) for l < 1, so
  // l mu^{2/3} = (4 pi / 3)^{2/3} (1 - l^{3/2})^{2/3} with supremum at l -> 0.
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 1000.0, 0.001, 1.002));
  const auto f = RadialField::sample(g, [](double r) { return 1.0 / (r * r); });
  const double sup = std::pow(4.0 * pi / 3.0, 2.0 / 3.0);
  const double q = weak_lp_quasinorm(f, 1.5);
  CHECK(q <= sup * 1.01);
  CHECK(q >= sup * 0.99);
}

TEST_CASE("omega mass of a Gaussian outside the unit ball") {
  const double t = 0.1;
  const auto g = make_radial_grid({3, 1.0, 10.0, 36000, 1.0});
  const auto f = RadialField::sample(g, [t](double r) { return gaussian_kernel(r, t, 3); });
  CHECK(omega_mass(f) == doctest::Approx(1.0 - oracle::chi3_cdf(1.0 / std::sqrt(2.0 * t))).epsilon(1e-6));
}

TEST_CASE("norm inequalities on random fields") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto g = make_radial_grid(stretched_domain(4, 1.0, 30.0, 0.05, 1.02));
  for (int trial = 0; trial < 20; ++trial) {
    auto f = RadialField::zeros(g), h = RadialField::zeros(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = unif(rng) / g->node(i);
      h[i] = unif(rng);
    }
    for (double p : {1.0, 1.5, 3.0}) {
      const double pc = p == 1.0 ? kInfinity : p / (p - 1.0);
      CHECK(std::abs(weighted_inner(f, h)) <= lp_norm(f, p) * lp_norm(h, pc) * (1.0 + 1e-12));
      CHECK(weak_lp_quasinorm(f, p) <= lp_norm(f, p) * (1.0 + 1e-12));
    }
    auto a = f;
    for (auto& v : a.values) v = std::abs(v);
    CHECK(omega_mass(a) == doctest::Approx(lp_norm(f, 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("exponent below one is a domain error") {
  const auto f = RadialField::constant(unit_grid(), 1.0);
  CHECK_THROWS_AS(lp_norm(f, 0.5), DomainError);
  CHECK_THROWS_AS(weak_lp_quasinorm(f, 0.0), DomainError);
  CHECK_THROWS_AS(weighted_inner(f, RadialField::constant(make_radial_grid({3, 1.0, 2.0, 20, 1.0}), 1.0)),
                  ConfigError);
}

TEST_CASE("power law fits") {
  DecaySeries s;
  for (int k = 0; k <= 10; ++k) {
    const double t = std::ldexp(1.0, k);
    s.push(t, 3.0 * std::pow(t, -0.7));
  }
  const auto fit = fit_in_place(s, {0, s.size()});
  CHECK(fit.slope == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.fitted_slope == fit.slope);

  const auto last = last_decade(s);
  CHECK(last.last == s.size());
  CHECK(s.times[last.first] >= s.times.back() / 10.0);
  CHECK(s.times[last.first - 1] < s.times.back() / 10.0);
}

TEST_CASE("log t / sqrt t fits shallower than -1/2") {
  DecaySeries s;
  for (double t = 100.0; t <= 10000.0 * (1.0 + 1e-12); t *= std::sqrt(2.0)) s.push(t, std::log(t) / std::sqrt(t));
  const auto fit = fit_decay_exponent(s, {0, s.size()});
  CHECK(fit.slope > -0.5);
  CHECK(fit.slope < -0.35);
}

TEST_CASE("fit preconditions") {
  DecaySeries s;
  s.push(1.0, 1.0);
  s.push(2.0, 0.5);
  CHECK_THROWS_AS(fit_decay_exponent(s, {0, 2}), DomainError);
  s.push(4.0, 0.0);
  CHECK_THROWS_AS(fit_decay_exponent(s, {0, 3}), DomainError);
}
