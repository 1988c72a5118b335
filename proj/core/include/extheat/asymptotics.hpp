#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "extheat/grid.hpp"
#include "extheat/io.hpp"
#include "extheat/norms.hpp"
#include "extheat/theta_heat.hpp"

namespace extheat {

/// Outcome of one experiment. `series` holds the measured quantity; `bounds`
/// and `targets` run parallel to it and end up as CSV columns.
struct ExperimentReport {
  std::string name;
  std::string inputs_digest;
  DecaySeries series;
  std::vector<double> bounds;
  std::vector<double> targets;
  /// NaN for inequality-type experiments.
  double target_exponent = 0.0;
  double slope_low = 0.0;
  double slope_high = 0.0;
  bool pass = false;
  /// False when the outer boundary contaminated the run.
  bool valid = true;
  std::map<std::string, double> metrics;
  std::vector<std::string> artifacts;
};

/// T0 * 2^k for k = 0..k_max.
std::vector<double> dyadic_times(double t0, int k_max);

/// Columns t, value, bound, target.
CsvTable report_table(const ExperimentReport& report);
nlohmann::json report_json(const ExperimentReport& report);

/// Writes <dir>/<name>.csv (t, value, bound, target) and <dir>/<name>.json and
/// records both paths in report.artifacts.
void save_report(ExperimentReport& report, const std::filesystem::path& dir);

/// Mass series of S(t)u0 against m = int u0 Phi, Phi from the closed form.
/// Passes when the series is non-increasing and the relative gap at the last
/// time is within `rel_tolerance`. Also records a 1/sqrt(t) extrapolation of
/// the limit as a metric.
ExperimentReport asymptotic_mass_experiment(const RadialField& u0, ThetaBC theta,
                                            std::span<const double> times,
                                            const SolverParams& params,
                                            double rel_tolerance = 0.02);

/// For every probe radius, sup over the checkpoints of |S(t)u0 - S_free(t)u0|.
/// Passes when the sups are non-increasing in the radius and the last one is
/// at most `epsilon`.
ExperimentReport far_field_closeness(const RadialField& u0, ThetaBC theta,
                                     std::span<const double> probe_radii,
                                     std::span<const double> times, const SolverParams& params,
                                     double epsilon = 0.05, double tail = 0.0);

/// max over the grid of |S(t)u0 - Phi S_free(t)u0| with a log-log fit over the
/// last decade. The accepted slope band is [-0.55, -0.35] for N = 3 and
/// -0.5 +- 0.1 for N >= 4. An identically zero series passes trivially.
ExperimentReport linfty_rate_experiment(const RadialField& u0, ThetaBC theta,
                                        std::span<const double> times, const SolverParams& params,
                                        double tail = 0.0);

/// 2 * max over the last decade of value * sqrt(t) / log(t) (N = 3) or
/// value * sqrt(t) (N > 3).
double estimate_envelope_constant(const ExperimentReport& rate, int dim);

/// Series t^{(N/2)(1/p - 1/q)} ||S(t)u0||_q. Passes when the last value is
/// below a tenth of the reference value: ||u0||_q when p = q, the first
/// checkpoint otherwise.
ExperimentReport lp_decay_experiment(const RadialField& u0, double p, double q, ThetaBC theta,
                                     std::span<const double> times, const SolverParams& params);

struct SlowDecaySetup {
  int levels = 3;         // shells k = 0..levels
  double p = 2.0;
  double base = 4.0;      // shell k sits on [base^k, 1.5 base^k]
  double time_base = 16.0;  // checked at t_k = time_base^k
};

/// Slowly decaying comparison function 0.5 / (1 + log(1 + t)).
double slow_decay_reference(double t);

/// u0 = sum_k 2^{-k/p'} 1_{shell k}, scaled to unit L^p norm.
RadialField slow_decay_data(GridPtr grid, const SlowDecaySetup& setup);

/// Checks ||S(t_k)u0||_p >= g(t_k) for every level.
ExperimentReport slow_decay_demo(GridPtr grid, ThetaBC theta, const SlowDecaySetup& setup,
                                 const std::function<double(double)>& g,
                                 const SolverParams& params);

}  // namespace extheat
