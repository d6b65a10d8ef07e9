#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gradflow/flows.hpp"
#include "gradflow/parallel.hpp"
#include "gradflow/problems.hpp"

namespace gradflow {

struct SimOptions {
  double step = 1e-4;
  double horizon = 5.0;
  double eps_x = 1e-3;  ///< on |x - x*| when the minimizer is known
  double eps_g = 1e-3;  ///< on |grad f| otherwise
  std::size_t record_stride = 1;
  /// Heun steps whose two slopes disagree by more than their magnitude are
  /// split in half, at most this many times.
  int max_subdivision = 12;
  Execution execution = Execution::Parallel;

  /// Throws DomainError.
  void validate() const;
  /// Number of grid steps covering the horizon.
  std::size_t step_count() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> thetas;     ///< empty for the finite-time law
  std::vector<double> lyapunov;   ///< |x - x*|^2; empty when x* is unknown

  std::optional<double> convergence_time;
  Vector final_state;
  double final_theta = 0.0;
  std::size_t steps = 0;

  bool has_theta = false;
  bool has_lyapunov = false;
  double lyapunov_initial = 0.0;
  /// Largest V(t_{k+1}) - V(t_k) over every step taken, recorded or not.
  double max_lyapunov_uptick = 0.0;
  /// Smallest theta over every grid point.
  double min_theta = 0.0;

  /// State at time t. After convergence the state is held at its converged
  /// value, so any t past the end returns final_state.
  const Vector& state_at(double t) const;
};

/// Integrates the law from x0 on a uniform grid.
///
/// x (and theta for the second-order law) use Heun's method. The fractional
/// gain uses a CaputoChannel on the same grid, with theta taken as linear
/// between its current value and the predictor inside the x step. Integration
/// stops at the first grid point where |x - x*| <= eps_x (or |grad f| <= eps_g
/// without a minimizer), or at the horizon.
///
/// Throws DivergenceError when the state stops being finite or |x| > 1e8, and
/// propagates SingularityError from the vector field.
Trajectory integrate(const FlowLaw& law, const Problem& problem, const Vector& x0,
                     const SimOptions& opts = {});

struct RunSpec {
  std::string label;
  FlowLaw law;
  Vector x0;
};

enum class RunStatus { Converged, NotConverged, Diverged, Failed };
std::string_view run_status_name(RunStatus s);

struct RunResult {
  std::string label;
  RunSpec spec;
  RunStatus status = RunStatus::Failed;
  std::optional<Trajectory> trajectory;
  BoundAttempt bound;
  std::string error;
};

/// Runs every spec independently. Results come back in input order whatever
/// the execution order; a failing run records its error in its own slot.
std::vector<RunResult> sweep(const Problem& problem, const std::vector<RunSpec>& runs,
                             const SimOptions& opts = {});

/// One run per initial condition, labelled ic1, ic2, ...
std::vector<RunSpec> vary_initial_conditions(const FlowLaw& law, const std::vector<Vector>& x0s);

/// One run per value of rho, alpha, lambda, beta or delta, labelled
/// "<name>_<value>". Throws ConfigError for an unknown parameter name.
std::vector<RunSpec> vary_parameter(const FlowLaw& law, const Vector& x0, const std::string& name,
                                    const std::vector<double>& values);

}  // namespace gradflow
