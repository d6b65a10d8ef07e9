#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gradflow/parallel.hpp"

namespace gradflow::fractional {

/// Product-trapezoidal weights w_0..w_n such that, on a uniform grid of step h,
///
///   theta(t_n) ~ theta(0) + h^beta * sum_j w_j f(t_j)
///
/// solves the Caputo problem D^beta theta = f. The weights are the classical
/// fractional Adams-Moulton coefficients divided by Gamma(beta + 2); they are
/// all positive and reduce to the trapezoidal rule for beta = 1. n = 0 yields
/// the single weight 0.
///
/// Throws DomainError unless 0 < beta <= 1.
std::vector<double> memory_weights(double beta, std::size_t n);

/// One state evolving by a Caputo derivative of order beta in (0, 1] on a
/// uniform grid, integrated with the fractional Adams-Bashforth-Moulton
/// predictor-corrector and full memory.
///
/// Usage per step: start(f_0) once, then for every step read predict(),
/// evaluate the right-hand side at the new grid point, and pass it to
/// advance(). When the right-hand side depends on theta, re-evaluate it at
/// the corrected value and pass that to reevaluate(). Not safe for concurrent
/// mutation.
class CaputoChannel {
 public:
  CaputoChannel(double beta, double step, double initial_value,
                Execution exec = Execution::Parallel);

  /// Records the right-hand side at t = 0.
  void start(double rhs0);
  bool started() const noexcept { return !history_.empty(); }

  /// Predictor value at the next grid point (rectangle rule on the history).
  double predict() const;

  /// Corrector: appends rhs_next = f(t_{n+1}) and returns theta(t_{n+1}).
  double advance(double rhs_next);

  /// Replaces the newest history sample with f(t_{n+1}, theta_{n+1}).
  /// Throws InconsistentStateError before the first advance().
  void reevaluate(double rhs_corrected);

  double value() const noexcept { return value_; }
  std::size_t steps() const noexcept { return started() ? history_.size() - 1 : 0; }
  double order() const noexcept { return beta_; }
  double step() const noexcept { return step_; }
  double initial_value() const noexcept { return initial_; }
  std::span<const double> history() const noexcept { return history_; }

 private:
  void require_started(const char* what) const;
  void grow_tables(std::size_t n) const;

  double beta_;
  double step_;
  double initial_;
  double value_;
  Execution exec_;
  double predictor_scale_;  // h^beta / Gamma(beta + 1)
  double corrector_scale_;  // h^beta / Gamma(beta + 2)
  std::vector<double> history_;
  // Weight caches, extended lazily as the history grows.
  mutable std::vector<double> predictor_weights_;  // b(m) = (m+1)^beta - m^beta
  mutable std::vector<double> corrector_weights_;  // c(m) = (m+2)^(beta+1) + m^(beta+1) - 2(m+1)^(beta+1)
};

/// Stateless corrector step: given f_0..f_n on the grid and f_{n+1}, returns
/// theta(t_{n+1}). Throws InconsistentStateError for an empty history.
double caputo_advance(double beta, double initial_value, std::span<const double> rhs_history,
                      double step, double rhs_next);

/// Solves D^beta theta = rhs(t, theta) for `steps` steps and returns
/// theta(t_0)..theta(t_steps). Predict-evaluate-correct-evaluate.
std::vector<double> solve_caputo(double beta, double initial_value,
                                 const std::function<double(double, double)>& rhs, double step,
                                 std::size_t steps, Execution exec = Execution::Parallel);

}  // namespace gradflow::fractional
