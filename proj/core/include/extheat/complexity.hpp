#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "extheat/grid.hpp"
#include "extheat/theta_heat.hpp"

namespace extheat {

enum class EnvelopeForm { logsqrt, sqrt };

std::string to_string(EnvelopeForm f);
EnvelopeForm parse_envelope_form(const std::string& s);

/// g(t) = C h(t) / Phi(x0) with h(t) = log(t)/sqrt(t) (N = 3) or 1/sqrt(t).
/// log(t)/sqrt(t) only decreases for t >= e^2, so below that it is replaced
/// by its maximum 2/e, which keeps g a non-increasing majorant.
struct EnvelopeFn {
  double constant = 0.0;
  EnvelopeForm form = EnvelopeForm::logsqrt;
  double profile_at_probe = 1.0;

  double operator()(double t) const;
};

EnvelopeFn make_envelope(double constant, int dim, double hole_radius, ThetaBC theta,
                         double probe_radius);

/// Radii R_0 < R_1 < ..., times t_1 < t_2 < ... and targets a_1, a_2, ...
/// The initial datum is the sum of the indicators of [R_{2m-1}, R_{2m}].
struct AnnuliData {
  int dim = 3;
  double hole_radius = 1.0;
  double theta = 0.0;
  double probe_radius = 2.0;
  std::vector<double> radii;
  std::vector<double> times;
  std::vector<double> targets;
  std::vector<double> envelope;  // g(t_n)
  EnvelopeFn envelope_fn;

  /// Inner and outer radius of every complete annulus.
  std::vector<std::pair<double, double>> annuli() const;
};

void to_json(nlohmann::json& j, const AnnuliData& d);
void from_json(const nlohmann::json& j, AnnuliData& d);

class SearchFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConstructionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gaussian mass seen from |x0| = d in the shell R_in < |y| < R_out_w.
double shell_mass_window(double d, double r_in, double r_out, double t, int dim, int refine = 1);

struct WindowSearch {
  double time = 0.0;
  double radius = 0.0;
  double inner_mass = 0.0;  // mass of B_R at `time`
  double outer_mass = 0.0;  // mass outside B_radius at `time`
  int doublings = 0;
};

/// Finds t > T with mass(B_R) <= eps/2 and R~ > R with mass outside B_R~ <=
/// eps/2, both seen from |x0| = d. Each quantity is doubled until the bound
/// holds and then bisected back towards the threshold, so the returned pair
/// is close to the smallest admissible one. Throws SearchFailure after 60
/// doublings or when the bounds do not re-verify.
WindowSearch window_search(double epsilon, double d, double t_min, double r_min, int dim,
                           int refine = 1);

/// Interleaves pads so that a_{2n-1} <= a_{2n} >= a_{2n+1}: a missing high
/// value becomes (1 + max of neighbours)/2, a missing low value min/2.
std::vector<double> alternate_pad(std::span<const double> targets);

bool is_alternating(std::span<const double> a);

struct AnnuliOptions {
  double start_time = 1.0;
  double time_cap = 1e12;
  /// Each step advances T until g(T) <= (1 - slack_fraction) * gap, so the
  /// window search runs with eps = gap - g(T) >= slack_fraction * gap.
  double slack_fraction = 0.1;
  int refine = 1;
};

/// Builds radii and times for the (padded) targets. Odd steps make the mass
/// of B_{R_{n-1}} plus the mass outside B_{R_n} at t_n at most a_n - g(t_n);
/// even steps make the mass of the shell [R_{n-1}, R_n] at t_n at least
/// a_n + g(t_n).
AnnuliData build_annuli(std::span<const double> targets, double probe_radius, double hole_radius,
                        ThetaBC theta, int dim, const EnvelopeFn& envelope,
                        const AnnuliOptions& options = {});

struct InequalityCheck {
  std::string label;
  int step = 0;       // n, 1-based
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // >= 0 when satisfied
  bool ok = false;
};

struct CrossingReport {
  int step = 0;
  double level = 0.0;  // a_n Phi(x0)
  double t_lo = 0.0;
  double t_hi = 0.0;
  double time = 0.0;
  double residual = 0.0;
  bool found = false;
};

struct SolverTracePoint {
  double time = 0.0;
  double value = 0.0;    // S^theta(t) u0 (x0)
  double free = 0.0;     // S_free(t) u0 (x0)
};

struct AnnuliVerification {
  std::vector<InequalityCheck> structure;
  std::vector<InequalityCheck> defining;   // per-step search inequalities
  std::vector<InequalityCheck> freespace;  // S_free(t_n) u0 (x0) against a_n -+ g(t_n)
  std::vector<InequalityCheck> solver;     // S^theta(t_n) u0 (x0) against a_n Phi(x0)
  std::vector<CrossingReport> crossings;
  std::vector<SolverTracePoint> trace;
  bool solver_run = false;
  bool partial = false;
  std::string note;

  bool freespace_pass() const;
  bool solver_pass() const;
  bool pass() const;
};

nlohmann::json to_json(const AnnuliVerification& v);

struct AnnuliSolverOptions {
  SolverParams params{};
  double tolerance = 1e-2;
  std::size_t max_nodes = 40000;
  double first_width = 0.01;
  double stretch = 1.01;
  int trace_samples = 24;
};

/// Re-checks every inequality by quadrature and optionally runs the theta
/// solver on a grid containing all annuli, reporting the side of a_n Phi(x0)
/// at each t_n and a bisected crossing time for each level.
AnnuliVerification verify_annuli(const AnnuliData& data, bool with_solver,
                                 const AnnuliSolverOptions& options = {});

/// S_free(t) u0 (x0) for the annuli datum.
double annuli_freespace_value(const AnnuliData& data, double t, int refine = 1);

/// Copy of `data` with radius `index` scaled by `factor`.
AnnuliData perturb_radius(const AnnuliData& data, std::size_t index, double factor);

}  // namespace extheat
