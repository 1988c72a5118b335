#include "extheat/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extheat/errors.hpp"
#include "extheat/freespace.hpp"
#include "extheat/profile.hpp"

namespace extheat {

namespace {

constexpr int kMaxDoublings = 60;
constexpr int kBisections = 60;
// Bisection aims slightly inside the threshold so that re-verification at a
// different quadrature resolution cannot flip the result.
constexpr double kAim = 1.0 - 1e-4;

double threshold_time(const EnvelopeFn& g, double t_from, double goal, double cap) {
  if (g(t_from) <= goal) return t_from;
  double lo = t_from, hi = t_from;
  while (g(hi) > goal) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) throw ConstructionFailure("envelope stays above the target gap up to the time cap");
  }
  for (int k = 0; k < kBisections && hi / lo - 1.0 > 1e-9; ++k) {
    const double mid = std::sqrt(lo * hi);
    (g(mid) <= goal ? hi : lo) = mid;
  }
  return hi;
}

InequalityCheck upper(std::string label, int step, double lhs, double rhs) {
  return {std::move(label), step, lhs, rhs, rhs - lhs, lhs <= rhs};
}

InequalityCheck lower(std::string label, int step, double lhs, double rhs) {
  return {std::move(label), step, lhs, rhs, lhs - rhs, lhs >= rhs};
}

nlohmann::json checks_json(const std::vector<InequalityCheck>& checks) {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"label", c.label},
                   {"step", c.step},
                   {"lhs", c.lhs},
                   {"rhs", c.rhs},
                   {"margin", c.margin},
                   {"ok", c.ok}});
  }
  return arr;
}

bool all_ok(const std::vector<InequalityCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.ok; });
}

}  // namespace

std::string to_string(EnvelopeForm f) { return f == EnvelopeForm::logsqrt ? "logsqrt" : "sqrt"; }

EnvelopeForm parse_envelope_form(const std::string& s) {
  if (s == "logsqrt") return EnvelopeForm::logsqrt;
  if (s == "sqrt") return EnvelopeForm::sqrt;
  throw ConfigError("envelope form must be logsqrt or sqrt, got '" + s + "'");
}

double EnvelopeFn::operator()(double t) const {
  if (!(t > 0.0)) throw DomainError("envelope needs t > 0");
  double shape;
  if (form == EnvelopeForm::logsqrt) {
    shape = t >= std::exp(2.0) ? std::log(t) / std::sqrt(t) : 2.0 / std::exp(1.0);
  } else {
    shape = 1.0 / std::sqrt(t);
  }
  return constant * shape / profile_at_probe;
}

EnvelopeFn make_envelope(double constant, int dim, double hole_radius, ThetaBC theta,
                         double probe_radius) {
  if (!(constant >= 0.0)) throw DomainError("envelope constant must be non-negative");
  if (!(probe_radius > hole_radius)) throw DomainError("probe must lie outside the hole");
  const double phi = closed_form_value(dim, hole_radius, theta, probe_radius);
  if (!(phi > 0.0)) throw DomainError("profile vanishes at the probe");
  return {constant, dim == 3 ? EnvelopeForm::logsqrt : EnvelopeForm::sqrt, phi};
}

std::vector<std::pair<double, double>> AnnuliData::annuli() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t m = 2; m < radii.size(); m += 2) out.emplace_back(radii[m - 1], radii[m]);
  return out;
}

void to_json(nlohmann::json& j, const AnnuliData& d) {
  j = {{"dim", d.dim},
       {"hole", d.hole_radius},
       {"theta", d.theta},
       {"probe", d.probe_radius},
       {"radii", d.radii},
       {"times", d.times},
       {"targets", d.targets},
       {"envelope", d.envelope},
       {"envelope_constant", d.envelope_fn.constant},
       {"envelope_form", to_string(d.envelope_fn.form)},
       {"profile_at_probe", d.envelope_fn.profile_at_probe}};
}

void from_json(const nlohmann::json& j, AnnuliData& d) {
  d.dim = j.at("dim").get<int>();
  d.hole_radius = j.at("hole").get<double>();
  d.theta = j.at("theta").get<double>();
  d.probe_radius = j.at("probe").get<double>();
  d.radii = j.at("radii").get<std::vector<double>>();
  d.times = j.at("times").get<std::vector<double>>();
  d.targets = j.at("targets").get<std::vector<double>>();
  d.envelope = j.value("envelope", std::vector<double>{});
  d.envelope_fn.constant = j.at("envelope_constant").get<double>();
  d.envelope_fn.form = parse_envelope_form(j.at("envelope_form").get<std::string>());
  d.envelope_fn.profile_at_probe = j.at("profile_at_probe").get<double>();
}

double shell_mass_window(double d, double r_in, double r_out, double t, int dim, int refine) {
  if (!(r_in < r_out)) throw DomainError("shell window needs R_in < R_out");
  return gaussian_shell_mass(d, r_in, r_out, t, dim, refine);
}

WindowSearch window_search(double epsilon, double d, double t_min, double r_min, int dim,
                           int refine) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("search needs 0 < eps < 1");
  if (!(t_min > 0.0) || !(r_min > 0.0) || !(d >= 0.0))
    throw DomainError("search needs T > 0, R > 0 and d >= 0");
  const double half = 0.5 * epsilon;
  const double aim = kAim * half;
  WindowSearch out;

  auto inner = [&](double t) { return gaussian_ball_mass(d, r_min, t, dim, refine); };
  double lo = t_min, hi = t_min * (1.0 + 1e-6);
  if (inner(hi) > aim) {
    int n = 0;
    while (inner(hi) > aim) {
      if (++n > kMaxDoublings) throw SearchFailure("time doubling cap exceeded");
      lo = hi;
      hi *= 2.0;
    }
    out.doublings += n;
    for (int k = 0; k < kBisections && hi / lo - 1.0 > 1e-6; ++k) {
      const double mid = std::sqrt(lo * hi);
      (inner(mid) <= aim ? hi : lo) = mid;
    }
  }
  out.time = hi;

  auto outer = [&](double r) { return gaussian_ball_complement(d, r, out.time, dim, refine); };
  double r_lo = r_min, r_hi = r_min * (1.0 + 1e-6);
  if (outer(r_hi) > aim) {
    r_hi = std::max(r_hi, d + std::sqrt(out.time));
    int n = 0;
    while (outer(r_hi) > aim) {
      if (++n > kMaxDoublings) throw SearchFailure("radius doubling cap exceeded");
      r_lo = r_hi;
      r_hi *= 2.0;
    }
    out.doublings += n;
    for (int k = 0; k < kBisections && r_hi / r_lo - 1.0 > 1e-6; ++k) {
      const double mid = 0.5 * (r_lo + r_hi);
      (outer(mid) <= aim ? r_hi : r_lo) = mid;
    }
  }
  out.radius = r_hi;

  out.inner_mass = gaussian_ball_mass(d, r_min, out.time, dim, refine);
  out.outer_mass = gaussian_ball_complement(d, out.radius, out.time, dim, refine);
  const double inner2 = gaussian_ball_mass(d, r_min, out.time, dim, 2 * refine);
  const double outer2 = gaussian_ball_complement(d, out.radius, out.time, dim, 2 * refine);
  if (std::max(out.inner_mass, inner2) > half || std::max(out.outer_mass, outer2) > half)
    throw SearchFailure("search result does not re-verify");
  return out;
}

bool is_alternating(std::span<const double> a) {
  for (std::size_t k = 1; k < a.size(); ++k) {
    // 1-based position k+1: even positions must not sit below their left neighbour,
    // odd positions must not sit above it.
    const bool even = (k + 1) % 2 == 0;
    if (even ? a[k] < a[k - 1] : a[k] > a[k - 1]) return false;
  }
  return true;
}

std::vector<double> alternate_pad(std::span<const double> targets) {
  std::vector<double> out;
  for (double v : targets) {
    if (!(v > 0.0 && v < 1.0)) throw DomainError("targets must lie in (0, 1)");
    if (!out.empty()) {
      const bool even = (out.size() + 1) % 2 == 0;
      const double prev = out.back();
      if (even && v < prev) {
        out.push_back(0.5 * (1.0 + std::max(prev, v)));
      } else if (!even && v > prev) {
        out.push_back(0.5 * std::min(prev, v));
      }
    }
    out.push_back(v);
  }
  return out;
}

AnnuliData build_annuli(std::span<const double> targets, double probe_radius, double hole_radius,
                        ThetaBC theta, int dim, const EnvelopeFn& envelope,
                        const AnnuliOptions& options) {
  if (dim < 3 && !theta.is_neumann()) throw DomainError("annuli construction needs N >= 3 or theta = 1");
  if (!(envelope.profile_at_probe > 0.0)) throw DomainError("profile vanishes at the probe");
  if (!(probe_radius > hole_radius)) throw DomainError("probe must lie outside the hole");
  if (!(options.slack_fraction > 0.0 && options.slack_fraction < 1.0))
    throw ConfigError("slack_fraction must lie in (0, 1)");

  AnnuliData data;
  data.dim = dim;
  data.hole_radius = hole_radius;
  data.theta = theta.theta();
  data.probe_radius = probe_radius;
  data.targets = alternate_pad(targets);
  data.envelope_fn = envelope;
  data.radii.push_back(hole_radius);

  double t_prev = options.start_time;
  for (std::size_t k = 0; k < data.targets.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const double a = data.targets[k];
    const double gap = n % 2 == 1 ? a : 1.0 - a;
    const double start = threshold_time(envelope, t_prev, (1.0 - options.slack_fraction) * gap,
                                        options.time_cap);
    const double eps = gap - envelope(start);

    WindowSearch s;
    try {
      s = window_search(eps, probe_radius, start, data.radii.back(), dim, options.refine);
    } catch (const SearchFailure& e) {
      throw ConstructionFailure("step " + std::to_string(n) + ": " + e.what());
    }
    if (s.time > options.time_cap)
      throw ConstructionFailure("step " + std::to_string(n) + " exceeds the time cap");
    data.times.push_back(s.time);
    data.radii.push_back(s.radius);
    data.envelope.push_back(envelope(s.time));
    t_prev = s.time;
  }
  return data;
}

double annuli_freespace_value(const AnnuliData& data, double t, int refine) {
  double sum = 0.0;
  for (auto [lo, hi] : data.annuli())
    sum += shell_mass_window(data.probe_radius, lo, hi, t, data.dim, refine);
  return sum;
}

AnnuliData perturb_radius(const AnnuliData& data, std::size_t index, double factor) {
  if (index >= data.radii.size()) throw DomainError("radius index out of range");
  AnnuliData out = data;
  out.radii[index] *= factor;
  return out;
}

bool AnnuliVerification::freespace_pass() const {
  return all_ok(structure) && all_ok(defining) && all_ok(freespace);
}

bool AnnuliVerification::solver_pass() const {
  if (!solver_run) return false;
  return all_ok(solver) && std::all_of(crossings.begin(), crossings.end(),
                                       [](const CrossingReport& c) { return c.found; });
}

bool AnnuliVerification::pass() const {
  return freespace_pass() && (!solver_run || solver_pass());
}

nlohmann::json to_json(const AnnuliVerification& v) {
  auto crossings = nlohmann::json::array();
  for (const auto& c : v.crossings) {
    crossings.push_back({{"step", c.step},
                         {"level", c.level},
                         {"t_lo", c.t_lo},
                         {"t_hi", c.t_hi},
                         {"time", c.time},
                         {"residual", c.residual},
                         {"found", c.found}});
  }
  return {{"structure", checks_json(v.structure)},
          {"defining", checks_json(v.defining)},
          {"freespace", checks_json(v.freespace)},
          {"solver", checks_json(v.solver)},
          {"crossings", crossings},
          {"solver_run", v.solver_run},
          {"partial", v.partial},
          {"note", v.note},
          {"freespace_pass", v.freespace_pass()},
          {"solver_pass", v.solver_pass()},
          {"pass", v.pass()}};
}

namespace {

void check_structure(const AnnuliData& data, AnnuliVerification& v) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < data.radii.size(); ++k) gap = std::min(gap, data.radii[k] - data.radii[k - 1]);
  v.structure.push_back(lower("radii_increasing", 0, data.radii.size() > 1 ? gap : 0.0, 0.0));
  v.structure.back().ok = data.radii.size() > 1 && gap > 0.0;
  v.structure.push_back(lower("inner_radius_outside_hole", 0, data.radii.empty() ? 0.0 : data.radii.front(),
                              data.hole_radius));
  gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < data.times.size(); ++k) gap = std::min(gap, data.times[k] - data.times[k - 1]);
  v.structure.push_back(lower("times_increasing", 0, data.times.size() > 1 ? gap : 1.0, 0.0));
  v.structure.back().ok = data.times.size() < 2 || gap > 0.0;
  v.structure.push_back(
      lower("counts_consistent", 0, double(data.times.size() == data.targets.size() &&
                                           data.radii.size() == data.targets.size() + 1),
            1.0));
  v.structure.push_back(lower("targets_alternate", 0, is_alternating(data.targets) ? 1.0 : 0.0, 1.0));
}

}  // namespace

AnnuliVerification verify_annuli(const AnnuliData& data, bool with_solver,
                                 const AnnuliSolverOptions& options) {
  AnnuliVerification v;
  check_structure(data, v);
  if (!all_ok(v.structure)) {
    v.note = "inconsistent annuli data";
    return v;
  }

  const int dim = data.dim;
  const double d = data.probe_radius;
  const auto& g = data.envelope_fn;
  for (std::size_t k = 0; k < data.times.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const double t = data.times[k];
    const double a = data.targets[k];
    const double r_prev = data.radii[k], r_n = data.radii[k + 1];
    const double s_free = annuli_freespace_value(data, t);
    if (n % 2 == 1) {
      const double lhs = gaussian_ball_mass(d, r_prev, t, dim) + gaussian_ball_complement(d, r_n, t, dim);
      v.defining.push_back(upper("inner_ball_plus_outer_tail", n, lhs, a - g(t)));
      v.freespace.push_back(upper("free_value_below", n, s_free, a - g(t)));
    } else {
      v.defining.push_back(lower("shell_mass", n, shell_mass_window(d, r_prev, r_n, t, dim), a + g(t)));
      v.freespace.push_back(lower("free_value_above", n, s_free, a + g(t)));
    }
  }

  if (!with_solver || data.times.empty()) return v;

  const ThetaBC theta(data.theta);
  const double phi = closed_form_value(dim, data.hole_radius, theta, d);
  const double t_last = data.times.back();
  const double r_far = std::max(data.radii.back(), d) + 8.0 * std::sqrt(t_last);
  const DomainSpec spec = stretched_domain(dim, data.hole_radius, r_far,
                                           std::min(options.first_width, (d - data.hole_radius) / 20.0),
                                           options.stretch);
  if (static_cast<std::size_t>(spec.n_cells) + 1 > options.max_nodes) {
    v.partial = true;
    v.note = "grid for the largest annulus exceeds the node budget; free-space checks only";
    return v;
  }
  v.solver_run = true;

  const auto grid = make_radial_grid(spec);
  RadialField u0 = RadialField::zeros(grid);
  for (auto [lo, hi] : data.annuli()) {
    const auto shell = RadialField::shell_indicator(grid, lo, hi);
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] += shell[i];
  }
  const FarFieldReference far{u0, 0.0};

  // Checkpoints: the constructed times plus log-spaced samples covering them.
  std::vector<double> times(data.times.begin(), data.times.end());
  const double t_first = data.times.front() / 8.0;
  for (int k = 0; k < options.trace_samples; ++k) {
    const double f = options.trace_samples > 1 ? double(k) / (options.trace_samples - 1) : 0.0;
    times.push_back(t_first * std::pow(t_last / t_first, f));
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-12 * y; }),
              times.end());

  const ThetaHeatSolver solver(grid, theta, options.params);
  const auto trace = solver.evolve_series(u0, times, far);
  auto probe = [&](const RadialField& f) { return grid->interpolate(f.values, d); };
  for (const auto& c : trace.checkpoints)
    v.trace.push_back({c.time, probe(c), annuli_freespace_value(data, c.time)});

  auto checkpoint_at = [&](double t) -> const RadialField& {
    for (const auto& c : trace.checkpoints)
      if (std::abs(c.time - t) <= 1e-12 * t) return c;
    throw NumericalError("missing checkpoint");
  };

  for (std::size_t k = 0; k < data.times.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const double level = data.targets[k] * phi;
    const double value = probe(checkpoint_at(data.times[k]));
    if (n % 2 == 1) {
      v.solver.push_back(upper("solver_below_level", n, value, level + options.tolerance));
    } else {
      v.solver.push_back(lower("solver_above_level", n, value, level - options.tolerance));
    }
  }

  // Bracketed crossings of a_n Phi(x0): [t_n, t_{n+1}], the last level in [t_{K-1}, t_K].
  const std::size_t count = data.times.size();
  for (std::size_t k = 0; k < count && count >= 2; ++k) {
    CrossingReport cr;
    cr.step = static_cast<int>(k) + 1;
    cr.level = data.targets[k] * phi;
    cr.t_lo = k + 1 < count ? data.times[k] : data.times[count - 2];
    cr.t_hi = k + 1 < count ? data.times[k + 1] : data.times[count - 1];

    const RadialField* left = nullptr;
    double right_time = 0.0;
    for (std::size_t j = 0; j + 1 < trace.checkpoints.size(); ++j) {
      const auto& a = trace.checkpoints[j];
      const auto& b = trace.checkpoints[j + 1];
      if (a.time < cr.t_lo * (1.0 - 1e-12) || b.time > cr.t_hi * (1.0 + 1e-12)) continue;
      if ((probe(a) - cr.level) * (probe(b) - cr.level) <= 0.0) {
        left = &a;
        right_time = b.time;
        break;
      }
    }
    if (left == nullptr) {
      v.crossings.push_back(cr);
      continue;
    }

    RadialField lo_field = *left;
    double lo_val = probe(lo_field) - cr.level;
    double hi_time = right_time;
    double best_time = lo_field.time, best_res = std::abs(lo_val);
    for (int it = 0; it < 40 && hi_time / lo_field.time - 1.0 > 1e-6; ++it) {
      const double mid = 0.5 * (lo_field.time + hi_time);
      SolverParams restart = options.params;
      restart.dt_initial = std::max(options.params.dt_initial, 1e-3 * (mid - lo_field.time));
      const ThetaHeatSolver step(grid, theta, restart);
      auto ev = step.evolve(lo_field, mid - lo_field.time, far);
      const double val = probe(ev.field) - cr.level;
      if (std::abs(val) < best_res) {
        best_res = std::abs(val);
        best_time = mid;
      }
      if (val * lo_val > 0.0) {
        lo_field = std::move(ev.field);
        lo_val = val;
      } else {
        hi_time = mid;
      }
    }
    cr.time = best_time;
    cr.residual = best_res;
    cr.found = best_res <= options.tolerance;
    v.crossings.push_back(cr);
  }
  return v;
}

}  // namespace extheat
