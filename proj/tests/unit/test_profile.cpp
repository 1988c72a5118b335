#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "extheat/errors.hpp"
#include "extheat/profile.hpp"

using namespace extheat;

namespace {

GridPtr profile_grid(int dim, double outer = 400.0) {
  return make_radial_grid(stretched_domain(dim, 1.0, outer, 0.002, 1.01));
}

// Exact truncated harmonic A + B r^{2-N} (or A + B log r) with phi(R) = 1 and
// -s phi'(a) + c phi(a) = 0.
double exact_truncated(int dim, double a, ThetaBC th, double radius, double r) {
  auto h = [dim](double x) { return dim == 2 ? std::log(x) : std::pow(x, 2 - dim); };
  auto dh = [dim](double x) { return dim == 2 ? 1.0 / x : (2.0 - dim) * std::pow(x, 1 - dim); };
  const double s = th.sin_coeff(), c = th.cos_coeff();
  // A c + B (c h(a) - s h'(a)) = 0 and A + B h(R) = 1.
  const double k = c * h(a) - s * dh(a);
  if (c == 0.0) return 1.0;
  const double b = 1.0 / (h(radius) - k / c);
  const double A = -b * k / c;
  return A + b * h(r);
}

}  // namespace

TEST_CASE("closed-form profile examples") {
  CHECK(closed_form_value(3, 1.0, ThetaBC(0.0), 2.0) == doctest::Approx(0.5));
  CHECK(closed_form_coefficient(3, 1.0, ThetaBC(0.0)) == doctest::Approx(1.0));
  CHECK(closed_form_coefficient(3, 1.0, ThetaBC(0.5)) == doctest::Approx(0.5));
  CHECK(closed_form_value(3, 1.0, ThetaBC(0.5), 1.0) == doctest::Approx(0.5));
  CHECK(closed_form_value(3, 1.0, ThetaBC(0.5), 2.0) == doctest::Approx(0.75));
  for (int n : {2, 3, 4, 5}) {
    CHECK(closed_form_coefficient(n, 1.0, ThetaBC(1.0)) == 0.0);
    CHECK(closed_form_value(n, 1.0, ThetaBC(1.0), 1.7) == 1.0);
  }
  CHECK(closed_form_value(2, 1.0, ThetaBC(0.0), 5.0) == 0.0);
  CHECK(closed_form_value(2, 1.0, ThetaBC(0.7), 5.0) == 0.0);
}

TEST_CASE("closed form satisfies the boundary condition for any hole") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 3;
    const double a = 0.1 + 5.0 * unit(rng);
    const ThetaBC th(unit(rng));
    const double c_star = closed_form_coefficient(n, a, th);
    const double phi = closed_form_value(n, a, th, a);
    const double dphi = c_star * (n - 2) * std::pow(a, 1 - n);
    CHECK(-th.sin_coeff() * dphi + th.cos_coeff() * phi == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(phi >= 0.0);
    CHECK(phi <= 1.0);
  }
}

TEST_CASE("closed-form profile on a grid") {
  const auto g = profile_grid(3, 50.0);
  const auto p = closed_form_profile(g, ThetaBC(0.0));
  CHECK(p.method == ProfileMethod::closed_form);
  CHECK(p.closed_form_coeff == doctest::Approx(1.0));
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(p.samples[i] >= p.samples[i - 1]);
  CHECK(p.samples[0] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("truncated harmonics are exact at the nodes") {
  for (int n : {2, 3, 4})
    for (double th : {0.0, 0.3, 0.5, 1.0}) {
      const auto g = make_radial_grid(stretched_domain(n, 1.0, 50.0, 0.05, 1.03));
      const double radius = 20.0;
      const auto phi = truncated_harmonic(g, ThetaBC(th), radius);
      const double rr = g->node(g->nearest(radius));
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double expect = g->node(i) <= rr ? exact_truncated(n, 1.0, ThetaBC(th), rr, g->node(i)) : 1.0;
        CHECK(phi[i] == doctest::Approx(expect).epsilon(1e-11).scale(1.0));
      }
    }
}

TEST_CASE("2d Dirichlet truncated harmonic at sqrt(e)") {
  const auto g = make_radial_grid({2, 1.0, std::exp(1.0), 64, 1.0});
  const auto phi = truncated_harmonic(g, ThetaBC(0.0), std::exp(1.0));
  CHECK(g->interpolate(phi.values, std::exp(0.5)) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("elliptic sequence decreases toward the closed form") {
  const auto g = profile_grid(3, 64.0);
  const std::vector<double> radii{8.0, 16.0, 32.0};
  const auto p = elliptic_profile(g, ThetaBC(0.0), radii);
  CHECK(p.monotone);
  CHECK(p.method == ProfileMethod::elliptic_limit);
  const std::size_t i2 = g->nearest(2.0);
  double prev = 1.0;
  for (const auto& it : p.iterates) {
    CHECK(it[i2] < prev);
    CHECK(it[i2] > closed_form_value(3, 1.0, ThetaBC(0.0), g->node(i2)));
    prev = it[i2];
  }
  // phi_R = Phi / (1 - 1/R), so linear extrapolation in 1/R from R1, R2
  // leaves Phi / (R1 R2) to leading order.
  const double phi = closed_form_value(3, 1.0, ThetaBC(0.0), g->node(i2));
  const double err = std::abs(p.samples[i2] - phi);
  CHECK(err <= 1.5 * phi / (p.sequence[1] * p.sequence[2]));
  CHECK(err < std::abs(p.iterates.back()[i2] - phi) / 10.0);
}

TEST_CASE("elliptic and closed-form profiles agree") {
  for (int n : {3, 4, 5})
    for (double th : {0.0, 0.5, 1.0}) {
      const auto g = profile_grid(n);
      const std::vector<double> radii{100.0, 400.0};
      const auto p = elliptic_profile(g, ThetaBC(th), radii);
      CHECK(p.monotone);
      double worst = 0.0;
      for (std::size_t i = 0; i < g->size() && g->node(i) <= p.valid_radius / 4.0; ++i)
        worst = std::max(worst, std::abs(p.samples[i] - closed_form_value(n, 1.0, ThetaBC(th), g->node(i))));
      CHECK(worst <= 1e-4);
    }
}

TEST_CASE("Neumann elliptic profile is one") {
  const auto g = profile_grid(4, 100.0);
  const auto p = elliptic_profile(g, ThetaBC(1.0), std::vector<double>{20.0, 80.0});
  for (const auto& it : p.iterates)
    for (double v : it.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("elliptic preconditions") {
  const auto g = profile_grid(3, 50.0);
  CHECK_THROWS_AS(elliptic_profile(g, ThetaBC(0.0), std::vector<double>{10.0}), DomainError);
  CHECK_THROWS_AS(elliptic_profile(g, ThetaBC(0.0), std::vector<double>{10.0, 60.0}), DomainError);
  CHECK_THROWS_AS(elliptic_profile(g, ThetaBC(0.0), std::vector<double>{20.0, 10.0}), DomainError);
  CHECK_THROWS_AS(truncated_harmonic(g, ThetaBC(0.0), 1.0), DomainError);
}

TEST_CASE("parabolic route") {
  SolverParams params;
  params.dt_initial = 1e-3;
  params.dt_growth = 1.02;
  const std::vector<double> times{1.0, 10.0, 100.0};

  SUBCASE("Neumann keeps the constant") {
    const auto g = profile_grid(3, 100.0);
    const auto p = parabolic_profile(g, ThetaBC(1.0), times, params, 50.0);
    for (double v : p.samples.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("3d Dirichlet approaches 1 - 1/r from above") {
    const auto g = profile_grid(3, 400.0);
    const auto p = parabolic_profile(g, ThetaBC(0.0), times, params, 50.0);
    CHECK(p.monotone);
    const double u2 = g->interpolate(p.samples.values, 2.0);
    CHECK(u2 >= 0.5);
    CHECK(u2 <= 0.56);
    for (const auto& it : p.iterates)
      for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(it[i] >= closed_form_value(3, 1.0, ThetaBC(0.0), g->node(i)) - 1e-3);
  }

  SUBCASE("2d Dirichlet drains slowly to zero") {
    const auto g = profile_grid(2, 400.0);
    const std::vector<double> long_times{1.0, 10.0, 100.0, 1000.0};
    const auto p = parabolic_profile(g, ThetaBC(0.0), long_times, params, 50.0);
    CHECK(p.monotone);
    double prev = 1.0;
    for (const auto& it : p.iterates) {
      const double v = g->interpolate(it.values, 2.0);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 0.3);
  }
}

TEST_CASE("profiles are ordered in theta") {
  const auto g = profile_grid(3, 100.0);
  const auto p0 = closed_form_profile(g, ThetaBC(0.0));
  const auto ph = closed_form_profile(g, ThetaBC(0.5));
  const auto p1 = closed_form_profile(g, ThetaBC(1.0));
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(p0.samples[i] <= ph.samples[i]);
    CHECK(ph.samples[i] <= p1.samples[i]);
  }
}

TEST_CASE("profile bounds") {
  for (int n : {3, 4}) {
    auto p = closed_form_profile(profile_grid(n), ThetaBC(0.0));
    const auto b = profile_bounds_check(p);
    CHECK_FALSE(b.degenerate);
    CHECK(b.c_fit == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.bound_constant == b.c_fit);
    CHECK(b.gradient_exponent == doctest::Approx(1.0 - n).epsilon(1e-3));
  }
  auto robin = closed_form_profile(profile_grid(3), ThetaBC(0.5));
  const auto rb = profile_bounds_check(robin);
  CHECK(rb.c_fit == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rb.gradient_exponent == doctest::Approx(-2.0).epsilon(1e-3));

  auto neumann = closed_form_profile(profile_grid(3), ThetaBC(1.0));
  const auto nb = profile_bounds_check(neumann);
  CHECK(nb.degenerate);
  CHECK(nb.c_fit == 0.0);
  CHECK(std::isnan(nb.gradient_exponent));
}
