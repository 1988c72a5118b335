#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>

#include "cli/inputs.hpp"
#include "extheat/asymptotics.hpp"
#include "extheat/complexity.hpp"
#include "extheat/errors.hpp"
#include "extheat/freespace.hpp"
#include "extheat/profile.hpp"

namespace extheat::cli {

namespace {

double norm_index(const Config& cfg, const std::string& key, const std::string& fallback) {
  const std::string s = cfg.text(key, fallback);
  if (s == "inf") return kInfinity;
  const double v = parse_number(key, s);
  if (!(v >= 1.0)) throw ConfigError(key + " must be >= 1 or inf");
  return v;
}

Outcome from_report(const ExperimentReport& r) {
  Outcome o;
  o.pass = r.pass;
  o.report = report_json(r);
  o.table = report_table(r);
  return o;
}

Outcome run_profile(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 400.0, 0.002, 1.01});
  const auto theta = build_theta(cfg);
  const std::string method = cfg.text("experiment.method", "closed");
  const double probe = cfg.number("experiment.probe", 2.0 * grid->hole_radius());
  const double tolerance = cfg.number("experiment.tolerance", 1e-3);
  if (probe < grid->hole_radius() || probe > grid->outer_radius())
    throw ConfigError("experiment.probe outside the grid");

  ProfileResult p;
  if (method == "closed") {
    p = closed_form_profile(grid, theta);
  } else if (method == "elliptic") {
    const auto radii = cfg.numbers("experiment.radii", "100,400");
    p = elliptic_profile(grid, theta, radii);
  } else if (method == "parabolic") {
    const auto times = parse_times("experiment.times", cfg.text("experiment.times", "1,10,100,1000"));
    const double window = cfg.number("experiment.window", 50.0);
    p = parabolic_profile(grid, theta, times, build_params(cfg), window);
  } else {
    throw ConfigError("experiment.method must be closed, elliptic or parabolic, got '" + method + "'");
  }

  // Deviation from the closed form: two-sided on [a, R/4] for the elliptic
  // route, one-sided (from below) on the window for the parabolic route.
  double deviation = 0.0;
  const double reach = method == "elliptic" ? 0.25 * p.valid_radius : p.valid_radius;
  for (std::size_t i = 0; i < grid->size() && grid->node(i) <= reach; ++i) {
    const double exact = closed_form_value(grid->dim(), grid->hole_radius(), theta, grid->node(i));
    const double diff = method == "parabolic" ? exact - p.samples[i] : std::abs(p.samples[i] - exact);
    deviation = std::max(deviation, diff);
  }

  nlohmann::json bounds = nullptr;
  if (grid->dim() >= 3) {
    const auto b = profile_bounds_check(p);
    bounds = {{"c_fit", b.c_fit}, {"gradient_exponent", b.gradient_exponent}, {"degenerate", b.degenerate}};
  }

  Outcome o;
  o.pass = p.monotone && deviation <= tolerance;
  o.table = profile_table(p);
  o.report = {{"name", "profile"},
              {"method", to_string(p.method)},
              {"theta", theta.theta()},
              {"dim", grid->dim()},
              {"closed_form_coefficient", p.closed_form_coeff},
              {"phi_at_probe", grid->interpolate(p.samples.values, probe)},
              {"probe", probe},
              {"valid_radius", p.valid_radius},
              {"monotone", p.monotone},
              {"monotonicity_violation", p.monotonicity_violation},
              {"closed_form_deviation", deviation},
              {"tolerance", tolerance},
              {"bounds", bounds},
              {"pass", o.pass}};
  return o;
}

Outcome run_evolve(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 1000.0, 0.01, 1.01});
  const auto theta = build_theta(cfg);
  const auto params = build_params(cfg);
  const auto data = parse_initial_data(grid, "experiment.data", cfg.text("experiment.data", "shell:2:3"));
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "1,10,100"));
  const ThetaHeatSolver solver(grid, theta, params);
  const auto trace = solver.evolve_series(data.field, times, FarFieldReference{data.field, data.tail});
  Outcome o;
  o.pass = !trace.contaminated;
  o.table = checkpoint_table(trace);
  o.report = evolution_manifest(*grid, theta, params, trace);
  o.report["name"] = "evolve";
  o.report["pass"] = o.pass;
  return o;
}

Outcome run_mass(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 2000.0, 0.005, 1.01});
  const auto data = parse_initial_data(grid, "experiment.data", cfg.text("experiment.data", "shell:2:3"));
  if (data.tail != 0.0) throw ConfigError("experiment.data must be integrable for the mass experiment");
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "1,10,50,100,200"));
  return from_report(asymptotic_mass_experiment(data.field, build_theta(cfg), times, build_params(cfg),
                                                cfg.number("experiment.tolerance", 0.02)));
}

Outcome run_farfield(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 2000.0, 0.01, 1.01});
  const auto data = parse_initial_data(grid, "experiment.data", cfg.text("experiment.data", "shell:2:3"));
  const auto probes = cfg.numbers("experiment.probes", "5,10,20");
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "1,10,100"));
  return from_report(far_field_closeness(data.field, build_theta(cfg), probes, times, build_params(cfg),
                                         cfg.number("experiment.epsilon", 0.05), data.tail));
}

Outcome run_rate(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 5000.0, 0.01, 1.01});
  const auto data = parse_initial_data(grid, "experiment.data", cfg.text("experiment.data", "ones"));
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "dyadic:1:10"));
  return from_report(linfty_rate_experiment(data.field, build_theta(cfg), times, build_params(cfg), data.tail));
}

Outcome run_lpdecay(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 5000.0, 0.02, 1.01});
  const auto theta = build_theta(cfg);
  const auto params = build_params(cfg);
  if (cfg.flag("experiment.slow", false)) {
    SlowDecaySetup setup;
    setup.levels = cfg.integer("experiment.levels", setup.levels);
    setup.p = cfg.number("experiment.p", setup.p);
    return from_report(slow_decay_demo(grid, theta, setup, slow_decay_reference, params));
  }
  const auto data = parse_initial_data(grid, "experiment.data", cfg.text("experiment.data", "shell:2:3"));
  if (data.tail != 0.0) throw ConfigError("experiment.data must be integrable for the decay experiment");
  const double p = norm_index(cfg, "experiment.p", "2");
  const double q = norm_index(cfg, "experiment.q", "2");
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "1,10,100,1000"));
  return from_report(lp_decay_experiment(data.field, p, q, theta, times, params));
}

Outcome run_kernelcmp(const Config& cfg) {
  const auto grid = build_grid(cfg, {1.0, 1000.0, 0.01, 1.001});
  const auto theta = build_theta(cfg);
  const auto params = build_params(cfg);
  const auto sources = cfg.numbers("experiment.rho", "2,5,20");
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "geom:0.001:1000:13"));

  Outcome o;
  o.table = CsvTable({"t", "value", "bound", "target", "rho"});
  o.pass = true;
  auto runs = nlohmann::json::array();
  for (double rho : sources) {
    if (rho < grid->hole_radius() || rho > grid->outer_radius())
      throw ConfigError("experiment.rho outside the grid");
    const auto cmp = shell_kernel_comparison(grid, rho, theta, times, params);
    const double late = 2.0 * (1.0 - closed_form_value(grid->dim(), grid->hole_radius(), ThetaBC(0.0),
                                                        cmp.source_radius));
    for (std::size_t k = 0; k < cmp.distance.size(); ++k)
      o.table.add_row({cmp.distance.times[k], cmp.distance.values[k], cmp.bounds[k], late, cmp.source_radius});
    o.pass = o.pass && cmp.within_bound;
    runs.push_back({{"rho", cmp.source_radius},
                    {"within_bound", cmp.within_bound},
                    {"worst_margin", cmp.worst_margin},
                    {"late_level", late},
                    {"final_distance", cmp.distance.values.back()},
                    {"series", cmp.distance}});
  }
  o.report = {{"name", "kernelcmp"}, {"theta", theta.theta()}, {"runs", runs}, {"pass", o.pass}};
  return o;
}

Outcome run_smoothing(const Config& cfg) {
  const auto grid = build_grid(cfg, {0.01, 1e4, 0.001, 1.01});
  const auto data = parse_initial_data(grid, "experiment.data", cfg.text("experiment.data", "power:2:1000"));
  const double p = norm_index(cfg, "experiment.p", "1.5");
  const double q = norm_index(cfg, "experiment.q", "inf");
  const double tolerance = cfg.number("experiment.tolerance", 0.05);
  const auto times = parse_times("experiment.times", cfg.text("experiment.times", "geom:1:10000:9"));
  auto series = smoothing_exponent_check(data.field, p, q, times);
  const double target = smoothing_exponent(grid->dim(), p, q);

  Outcome o;
  o.pass = std::abs(series.fitted_slope - target) <= tolerance * std::abs(target);
  const double anchor = series.values.back() / std::pow(series.times.back(), target);
  for (std::size_t k = 0; k < series.size(); ++k)
    o.table.add_row({series.times[k], series.values[k], std::nan(""), anchor * std::pow(series.times[k], target)});
  o.report = {{"name", "smoothing"},
              {"p", p},
              {"q", std::isinf(q) ? nlohmann::json("inf") : nlohmann::json(q)},
              {"target_exponent", target},
              {"fitted_slope", series.fitted_slope},
              {"fit_r2", series.fit_r2},
              {"tolerance", tolerance},
              {"series", series},
              {"pass", o.pass}};
  return o;
}

Outcome run_complexity(const Config& cfg) {
  const int dim = cfg.integer("domain.dim", 3);
  const double hole = cfg.number("domain.hole", 1.0);
  const auto theta = build_theta(cfg);
  const auto params = build_params(cfg);
  const auto targets = cfg.numbers("experiment.targets", "0.3,0.7");
  const double probe = cfg.number("experiment.probe", 2.0);
  const std::string envelope_text = cfg.text("experiment.envelope", "auto");
  const bool with_solver = cfg.flag("experiment.with_solver", true);

  double constant = 0.0;
  nlohmann::json envelope_source;
  if (envelope_text == "auto") {
    // Empirical constant from the L-infinity rate of S(t)1.
    const auto grid = make_radial_grid(stretched_domain(dim, hole, 5000.0 * hole, 0.01 * hole, 1.01));
    const auto ones = RadialField::constant(grid, 1.0);
    const auto rate = linfty_rate_experiment(ones, theta, dyadic_times(1.0, 10), params, 1.0);
    constant = rate.metrics.count("envelope_constant") ? rate.metrics.at("envelope_constant") : 0.0;
    envelope_source = {{"method", "rate_experiment"}, {"inputs_digest", rate.inputs_digest}};
  } else {
    constant = parse_number("experiment.envelope", envelope_text);
    envelope_source = {{"method", "given"}};
  }

  AnnuliOptions options;
  options.slack_fraction = cfg.number("experiment.slack", options.slack_fraction);
  options.start_time = cfg.number("experiment.start_time", options.start_time);
  AnnuliSolverOptions solver_options;
  solver_options.params = params;
  solver_options.tolerance = cfg.number("experiment.tolerance", solver_options.tolerance);

  Outcome o;
  AnnuliData data;
  try {
    data = build_annuli(targets, probe, hole, theta, dim, make_envelope(constant, dim, hole, theta, probe), options);
  } catch (const ConstructionFailure& e) {
    o.pass = false;
    o.report = {{"name", "complexity"}, {"error", e.what()}, {"envelope_constant", constant}, {"pass", false}};
    return o;
  }
  const auto verification = verify_annuli(data, with_solver, solver_options);

  const double phi = data.envelope_fn.profile_at_probe;
  for (const auto& point : verification.trace) {
    // Target level a_n Phi(x0) for the next constructed time at or after t.
    std::size_t n = 0;
    while (n + 1 < data.times.size() && data.times[n] < point.time * (1.0 - 1e-12)) ++n;
    o.table.add_row({point.time, point.value, phi * point.free, data.targets[n] * phi});
  }
  o.pass = verification.pass();
  o.report = {{"name", "complexity"},
              {"annuli", data},
              {"verification", to_json(verification)},
              {"envelope_source", envelope_source},
              {"pass", o.pass}};
  return o;
}

std::vector<OptionSpec> data_times(const std::string& times_help) {
  return {{"experiment.data", "--data", "initial data: zero | ones | shell:LO:HI | source:RHO | power:ALPHA[:CUTOFF]"},
          {"experiment.times", "--times", times_help}};
}

}  // namespace

const std::vector<OptionSpec>& common_options() {
  static const std::vector<OptionSpec> options = {
      {"domain.dim", "--dim", "space dimension N"},
      {"domain.hole", "--hole", "hole radius a"},
      {"domain.outer", "--outer", "truncation radius"},
      {"domain.first_width", "--first-width", "width of the cell next to the hole"},
      {"domain.cells", "--cells", "explicit cell count (overrides --first-width)"},
      {"domain.stretch", "--stretch", "geometric growth of cell widths"},
      {"bc.theta", "--theta", "boundary parameter in [0, 1]"},
      {"solver.dt", "--dt", "initial time step"},
      {"solver.dt_growth", "--dt-growth", "time step growth factor"},
      {"solver.scheme", "--scheme", "backward_euler | crank_nicolson"},
      {"solver.outer_bc", "--outer-bc", "match_freespace | homogeneous_neumann"},
      {"solver.tol", "--tol", "linear solve residual tolerance"},
      {"solver.contamination", "--contamination", "outer mismatch threshold"},
      {"run.output_dir", "--output-dir", "directory for CSV/JSON outputs"},
      {"run.name", "--name", "output file stem"},
  };
  return options;
}

const std::vector<CommandSpec>& experiments() {
  static const std::vector<CommandSpec> table = {
      {"profile", "asymptotic profile by closed form, elliptic or parabolic route",
       {{"experiment.method", "--method", "closed | elliptic | parabolic"},
        {"experiment.radii", "--radii", "truncation radii for the elliptic route"},
        {"experiment.times", "--times", "checkpoint times for the parabolic route"},
        {"experiment.window", "--window", "monitoring radius for the parabolic route"},
        {"experiment.probe", "--probe", "radius reported in the JSON"},
        {"experiment.tolerance", "--tolerance", "allowed deviation from the closed form"}},
       run_profile},
      {"evolve", "evolve radial data and dump checkpoints", data_times("checkpoint times"), run_evolve},
      {"mass", "long-time mass against the profile-weighted integral",
       [] {
         auto o = data_times("checkpoint times");
         o.push_back({"experiment.tolerance", "--tolerance", "relative mass gap at the last time"});
         return o;
       }(),
       run_mass},
      {"farfield", "distance to the whole-space solution at probe radii",
       [] {
         auto o = data_times("checkpoint times");
         o.push_back({"experiment.probes", "--probes", "increasing probe radii"});
         o.push_back({"experiment.epsilon", "--epsilon", "bound at the largest probe"});
         return o;
       }(),
       run_farfield},
      {"rate", "L-infinity convergence rate towards the profile times the free solution",
       data_times("checkpoint times (dyadic:T0:K recommended)"), run_rate},
      {"lpdecay", "weighted L^q decay of L^p data, or the slow-decay demonstration",
       [] {
         auto o = data_times("checkpoint times");
         o.push_back({"experiment.p", "--p", "integrability exponent"});
         o.push_back({"experiment.q", "--q", "measured norm exponent (or inf)"});
         o.push_back({"experiment.slow", "--slow", "run the slow-decay demonstration"});
         o.push_back({"experiment.levels", "--levels", "shell count minus one for --slow"});
         return o;
       }(),
       run_lpdecay},
      {"kernelcmp", "L^1 distance between exterior and free evolutions of sphere sources",
       {{"experiment.rho", "--rho", "source radii"}, {"experiment.times", "--times", "checkpoint times"}},
       run_kernelcmp},
      {"smoothing", "free-space L^p to L^q smoothing exponent",
       [] {
         auto o = data_times("evaluation times");
         o.push_back({"experiment.p", "--p", "integrability exponent of the data"});
         o.push_back({"experiment.q", "--q", "measured norm exponent (or inf)"});
         o.push_back({"experiment.tolerance", "--tolerance", "relative exponent tolerance"});
         return o;
       }(),
       run_smoothing},
      {"complexity", "annuli data whose value at a probe chases target levels",
       {{"experiment.targets", "--targets", "target values in (0, 1)"},
        {"experiment.probe", "--probe", "probe radius |x0|"},
        {"experiment.envelope", "--envelope", "envelope constant or auto"},
        {"experiment.with_solver", "--with-solver", "also run the exterior solver (true/false)"},
        {"experiment.slack", "--slack", "fraction of each gap left for the search"},
        {"experiment.start_time", "--start-time", "first admissible time"},
        {"experiment.tolerance", "--tolerance", "solver-side tolerance"}},
       run_complexity},
  };
  return table;
}

const CommandSpec& find_experiment(const std::string& name) {
  for (const auto& c : experiments())
    if (c.name == name) return c;
  throw ConfigError("unknown experiment '" + name + "'");
}

bool is_known_key(const std::string& key) {
  if (key == "run.experiment") return true;
  for (const auto& o : common_options())
    if (o.key == key) return true;
  for (const auto& c : experiments())
    for (const auto& o : c.options)
      if (o.key == key) return true;
  return false;
}

}  // namespace extheat::cli
