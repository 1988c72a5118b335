// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [artifact_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "extheat/asymptotics.hpp"
#include "extheat/complexity.hpp"
#include "extheat/freespace.hpp"
#include "extheat/io.hpp"
#include "extheat/norms.hpp"
#include "extheat/profile.hpp"
#include "extheat/theta_heat.hpp"

using namespace extheat;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

SolverParams growing(double dt = 1e-3, double growth = 1.02) {
  SolverParams p;
  p.dt_initial = dt;
  p.dt_growth = growth;
  return p;
}

fs::path g_artifacts = "acceptance_artifacts";

// 1. Elliptic profile against the closed form.
Verdict profile_agreement() {
  Verdict v;
  for (int n : {3, 4, 5})
    for (double th : {0.0, 0.5, 1.0}) {
      const auto g = make_radial_grid(stretched_domain(n, 1.0, 400.0, 0.002, 1.01));
      const auto p = elliptic_profile(g, ThetaBC(th), std::vector<double>{100.0, 400.0});
      double worst = 0.0;
      for (std::size_t i = 0; i < g->size() && g->node(i) <= p.valid_radius / 4.0; ++i)
        worst = std::max(worst, std::abs(p.samples[i] - closed_form_value(n, 1.0, ThetaBC(th), g->node(i))));
      v.require(worst <= 1e-4, "N=" + std::to_string(n) + " theta=" + fmt(th) + " err=" + fmt(worst, 2));
    }
  return v;
}

// 2. Monotone elliptic and parabolic limits.
Verdict monotone_limits() {
  Verdict v;
  for (int n : {3, 4})
    for (double th : {0.0, 0.5}) {
      const auto g = make_radial_grid(stretched_domain(n, 1.0, 400.0, 0.002, 1.01));
      const auto e = elliptic_profile(g, ThetaBC(th), std::vector<double>{25.0, 50.0, 100.0, 200.0, 400.0});
      v.require(e.monotone, "elliptic N=" + std::to_string(n) + " theta=" + fmt(th) + " violation=" +
                                fmt(e.monotonicity_violation, 2));

      const std::vector<double> times{1.0, 10.0, 100.0, 1000.0};
      const auto p = parabolic_profile(g, ThetaBC(th), times, growing(), 50.0);
      double below = 0.0;
      for (const auto& it : p.iterates)
        for (std::size_t i = 0; i < g->size() && g->node(i) <= p.valid_radius; ++i)
          below = std::max(below, closed_form_value(n, 1.0, ThetaBC(th), g->node(i)) - it[i]);
      v.require(p.monotone && below <= 1e-3, "parabolic N=" + std::to_string(n) + " theta=" + fmt(th) +
                                                 " below_phi=" + fmt(below, 2));
    }
  return v;
}

// 3. Profile bounds for the Dirichlet profile.
Verdict profile_bounds() {
  Verdict v;
  for (int n : {3, 4}) {
    auto p = closed_form_profile(make_radial_grid(stretched_domain(n, 1.0, 400.0, 0.002, 1.01)), ThetaBC(0.0));
    const auto b = profile_bounds_check(p);
    v.require(std::isfinite(b.c_fit) && std::abs(b.gradient_exponent + (n - 1)) <= 0.1,
              "N=" + std::to_string(n) + " C_fit=" + fmt(b.c_fit) + " exponent=" + fmt(b.gradient_exponent));
  }
  return v;
}

// 4. Asymptotic mass.
Verdict asymptotic_mass() {
  Verdict v;
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 400.0, 0.005, 1.01));
  const auto u0 = RadialField::shell_indicator(g, 2.0, 3.0);
  const std::vector<double> times{1.0, 10.0, 50.0, 100.0, 200.0};
  auto dir = asymptotic_mass_experiment(u0, ThetaBC(0.0), times, growing(1e-4), 0.02);
  save_report(dir, g_artifacts / "criterion4");
  v.require(dir.metrics.at("non_increasing") == 1.0, "Dirichlet mass non-increasing");
  v.require(dir.pass, "Dirichlet gap at t=200 " + fmt(100.0 * dir.metrics.at("relative_gap")) +
                          "% (limit 2%, extrapolated " + fmt(100.0 * dir.metrics.at("extrapolated_gap"), 2) + "%)");
  const auto neu = asymptotic_mass_experiment(u0, ThetaBC(1.0), times, growing(1e-4), 1e-6);
  v.require(neu.pass && neu.metrics.at("relative_gap") <= 1e-6,
            "Neumann gap " + fmt(neu.metrics.at("relative_gap"), 2));
  return v;
}

double rate_slope(int dim, double first_width, double stretch, const std::string& name) {
  const auto g = make_radial_grid(stretched_domain(dim, 1.0, 5000.0, first_width, stretch));
  auto r = linfty_rate_experiment(RadialField::constant(g, 1.0), ThetaBC(0.0), dyadic_times(1.0, 10), growing(), 1.0);
  r.name = name;
  save_report(r, g_artifacts / "criterion5");
  return r.metrics.at("slope");
}

// 5. L-infinity rate with grid halving.
Verdict linfty_rate() {
  Verdict v;
  for (int n : {3, 4}) {
    const double coarse = rate_slope(n, 0.01, 1.01, "rate_N" + std::to_string(n));
    const double fine = rate_slope(n, 0.005, std::sqrt(1.01), "rate_N" + std::to_string(n) + "_halved");
    const bool in_band = n == 3 ? (coarse >= -0.55 && coarse <= -0.35) : std::abs(coarse + 0.5) <= 0.1;
    v.require(in_band, "N=" + std::to_string(n) + " slope=" + fmt(coarse) +
                           (n == 3 ? " (band [-0.55,-0.35])" : " (band -0.5+-0.1)"));
    v.require(std::abs(coarse - fine) < 0.05, "N=" + std::to_string(n) + " halving shift=" + fmt(fine - coarse, 2));
  }
  return v;
}

// 6. Ordering in theta.
Verdict theta_monotonicity() {
  Verdict v;
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 60.0, 0.01, 1.02));
  const std::vector<RadialField> data{RadialField::shell_indicator(g, 2.0, 3.0),
                                      RadialField::sample(g, [](double r) { return std::exp(-(r - 1.5) * (r - 1.5)); })};
  const std::vector<double> times{0.1, 1.0, 10.0, 100.0};
  const double pairs[][2] = {{0.0, 0.5}, {0.5, 1.0}, {0.0, 1.0}, {0.3, 0.7}};
  double worst = 0.0;
  for (const auto& u0 : data)
    for (const auto& pr : pairs)
      worst = std::max(worst, theta_monotonicity_check(u0, ThetaBC(pr[0]), ThetaBC(pr[1]), times, growing(1e-4, 1.01))
                                  .max_violation);
  v.require(worst <= 1e-8, "max violation " + fmt(worst, 2));
  return v;
}

// 7. Discrete self-adjointness on random pairs.
Verdict selfadjointness() {
  Verdict v;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SolverParams p = growing(1e-2, 1.05);
  p.outer_bc = OuterBC::homogeneous_neumann;
  double worst = 0.0;
  for (int n : {3, 4}) {
    const auto g = make_radial_grid(stretched_domain(n, 1.0, 40.0, 0.02, 1.02));
    for (double th : {0.0, 0.25, 0.5, 1.0})
      for (int trial = 0; trial < 5; ++trial) {
        auto f = RadialField::zeros(g), h = RadialField::zeros(g);
        for (auto& x : f.values) x = unif(rng);
        for (auto& x : h.values) x = unif(rng);
        const double defect = discrete_selfadjointness_check(f, h, ThetaBC(th), 2.0, p);
        worst = std::max(worst, defect / (lp_norm(f, 2.0) * lp_norm(h, 2.0)));
      }
  }
  v.require(worst <= 1e-10, "max defect/(|f||g|) " + fmt(worst, 2));
  return v;
}

// L^p -> L^q constant of the free kernel from Young: ||G(t)||_r with 1 + 1/q = 1/r + 1/p.
double young_constant(int dim, double p, double q) {
  const double inv_r = 1.0 + (std::isinf(q) ? 0.0 : 1.0 / q) - 1.0 / p;
  const double r = 1.0 / inv_r;
  // t^{(N/2)(1/p-1/q)} ||G(t)||_r is independent of t.
  const double base = std::pow(4.0 * std::numbers::pi, -dim / 2.0);
  if (std::isinf(r)) return base;
  return base * std::pow(4.0 * std::numbers::pi / r, dim / (2.0 * r));
}

// 8. Smoothing exponents.
Verdict smoothing() {
  Verdict v;
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 400.0, 0.01, 1.01));
  const auto u0 = RadialField::shell_indicator(g, 2.0, 3.0);
  const std::vector<double> times{0.1, 1.0, 10.0, 100.0, 1000.0};
  for (double th : {0.0, 1.0})
    for (auto [p, q] : {std::pair{1.0, kInfinity}, std::pair{1.0, 2.0}, std::pair{2.0, kInfinity}}) {
      const auto s = lp_lq_smoothing_check(u0, ThetaBC(th), p, q, times, growing());
      double peak = 0.0;
      for (double x : s.values) peak = std::max(peak, x);
      const double ratio = peak / (young_constant(3, p, q) * lp_norm(u0, p));
      // Dirichlet is dominated by the free kernel; Neumann only up to a constant.
      v.require(std::isfinite(ratio) && ratio <= (th == 0.0 ? 1.01 : 2.0),
                "theta=" + fmt(th) + " (" + fmt(p) + "," + fmt(q) + ") sup/Young=" + fmt(ratio, 3));
    }

  const auto shell_grid = make_radial_grid(stretched_domain(3, 1.0, 2000.0, 0.02, 1.01));
  const auto shell = RadialField::shell_indicator(shell_grid, 2.0, 3.0);
  const std::vector<double> late{100.0, 200.0, 400.0, 800.0, 1600.0};
  for (double q : {kInfinity, 2.0}) {
    const auto s = smoothing_exponent_check(shell, 1.0, q, late);
    const double target = smoothing_exponent(3, 1.0, q);
    v.require(std::abs(s.fitted_slope - target) <= 0.05 * std::abs(target),
              "free (1," + fmt(q) + ") slope=" + fmt(s.fitted_slope) + " target=" + fmt(target));
  }
  const auto wg = make_radial_grid(stretched_domain(3, 0.01, 1e4, 0.001, 1.01));
  const auto weak = RadialField::sample(wg, [](double r) { return r <= 1000.0 ? 1.0 / (r * r) : 0.0; });
  const auto s = smoothing_exponent_check(weak, 1.5, kInfinity, std::vector<double>{1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0});
  v.require(std::abs(s.fitted_slope + 1.0) <= 0.05, "free (3/2 weak,inf) slope=" + fmt(s.fitted_slope));
  return v;
}

// 9. Sphere-source kernel comparison.
Verdict kernel_comparison() {
  Verdict v;
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 1000.0, 0.01, 1.001));
  std::vector<double> times;
  for (int k = 0; k <= 12; ++k) times.push_back(1e-3 * std::pow(1e6, k / 12.0));
  for (double th : {0.0, 1.0})
    for (double rho : {2.0, 5.0, 20.0}) {
      const auto cmp = shell_kernel_comparison(g, rho, ThetaBC(th), times, growing(1e-5, 1.01));
      std::string what = "theta=" + fmt(th) + " rho=" + fmt(rho) + " margin=" + fmt(cmp.worst_margin, 3);
      if (rho == 20.0) {
        const double late = 2.0 * (1.0 - closed_form_value(3, 1.0, ThetaBC(0.0), cmp.source_radius)) + 1e-3;
        const double last = cmp.distance.values.back();
        what += " late=" + fmt(last, 3) + "<=" + fmt(late, 3);
        v.require(cmp.within_bound && last <= late, what);
      } else {
        v.require(cmp.within_bound, what);
      }
    }
  return v;
}

// 10. L^2 decay of shell data.
Verdict lp_decay() {
  Verdict v;
  const auto g = make_radial_grid(stretched_domain(3, 1.0, 2000.0, 0.01, 1.01));
  const auto u0 = RadialField::shell_indicator(g, 2.0, 3.0);
  const auto r = lp_decay_experiment(u0, 2.0, 2.0, ThetaBC(0.0), std::vector<double>{1.0, 10.0, 100.0, 1000.0},
                                     growing());
  const double ratio = r.series.values.back() / lp_norm(u0, 2.0);
  v.require(ratio < 1e-2, "||u(1000)||_2/||u0||_2=" + fmt(ratio, 3));
  return v;
}

// 11. Annuli construction.
Verdict complexity_construction() {
  Verdict v;
  const auto rate_grid = make_radial_grid(stretched_domain(3, 1.0, 5000.0, 0.01, 1.01));
  const auto rate = linfty_rate_experiment(RadialField::constant(rate_grid, 1.0), ThetaBC(0.0), dyadic_times(1.0, 10),
                                           growing(), 1.0);
  const double constant = rate.metrics.at("envelope_constant");

  const auto targets = alternate_pad(std::vector<double>{0.3, 0.7});
  const auto env = make_envelope(constant, 3, 1.0, ThetaBC(0.0), 2.0);
  const auto data = build_annuli(targets, 2.0, 1.0, ThetaBC(0.0), 3, env);
  v.require(true, "C=" + fmt(constant) + " times=" + std::to_string(data.times.size()));

  AnnuliSolverOptions opts;
  opts.params = growing();
  const auto ver = verify_annuli(data, true, opts);
  v.require(ver.freespace_pass(), "quadrature inequalities");
  v.require(ver.solver_run && ver.solver_pass(), "solver sides");

  const auto bad = verify_annuli(perturb_radius(data, 1, 0.9), false);
  v.require(!bad.freespace_pass(), "R1 -10% detected");

  for (const auto& c : ver.crossings)
    v.require(c.found, "crossing n=" + std::to_string(c.step) + " t=" + fmt(c.time) + " in [" + fmt(c.t_lo) + "," +
                           fmt(c.t_hi) + "]");
  v.require(ver.crossings.size() == 2, "two crossings");

  const double phi = env.profile_at_probe;
  CsvTable table({"t", "value", "bound", "target"});
  for (const auto& pt : ver.trace) {
    std::size_t n = 0;
    while (n + 1 < data.times.size() && data.times[n] < pt.time * (1.0 - 1e-12)) ++n;
    table.add_row({pt.time, pt.value, phi * pt.free, data.targets[n] * phi});
  }
  fs::create_directories(g_artifacts / "criterion11");
  table.save(g_artifacts / "criterion11" / "complexity.csv");
  write_json(g_artifacts / "criterion11" / "complexity.json",
             {{"annuli", data}, {"verification", to_json(ver)}, {"envelope_constant", constant}});
  return v;
}

// 12. Window search soundness.
Verdict search_soundness() {
  Verdict v;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int ok = 0;
  for (int k = 0; k < 100; ++k) {
    const double eps = 0.05 + 0.45 * unit(rng);
    const double d = 1.5 + 8.5 * unit(rng);
    const int dim = unit(rng) < 0.5 ? 3 : 4;
    const double t0 = std::exp(std::log(0.1) + std::log(1e3) * unit(rng));
    const double r0 = 0.5 + 20.0 * unit(rng);
    const auto s = window_search(eps, d, t0, r0, dim);
    const bool inner = gaussian_ball_mass(d, r0, s.time, dim, 2) <= eps / 2.0;
    const bool outer = gaussian_ball_complement(d, s.radius, s.time, dim, 2) <= eps / 2.0;
    if (inner && outer && s.time >= t0 && s.radius >= r0) ++ok;
  }
  v.require(ok == 100, std::to_string(ok) + "/100 instances");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_artifacts = argv[1];
  fs::create_directories(g_artifacts);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"profile agreement", profile_agreement},
      {"monotone limits", monotone_limits},
      {"profile bounds", profile_bounds},
      {"asymptotic mass", asymptotic_mass},
      {"L-infinity rate", linfty_rate},
      {"theta monotonicity", theta_monotonicity},
      {"self-adjointness", selfadjointness},
      {"smoothing exponents", smoothing},
      {"kernel L1 comparison", kernel_comparison},
      {"Lp decay", lp_decay},
      {"complexity construction", complexity_construction},
      {"search soundness", search_soundness},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::printf("criterion %2zu %-24s %s [%.1fs] %s\n", k + 1, criteria[k].first.c_str(), v.pass ? "PASS" : "FAIL",
                secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
