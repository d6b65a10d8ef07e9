#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gradflow/problems.hpp"
#include "gradflow/special_fn.hpp"

namespace gradflow {

enum class FlowVariant { FiniteTime, FixedTimeSecondOrder, FixedTimeFractional };

std::string_view variant_name(FlowVariant v);
/// Accepts "finite_time", "second_order", "fractional". Throws ConfigError.
FlowVariant parse_variant(std::string_view name);

/// Parameters of one of the three gradient-flow families.
///
///   finite time:  x' = -rho g / (|g| + delta)^alpha
///   second order: x' = -theta g / (|g| + delta)^alpha,  theta' = -lambda theta + rho |g|^alpha
///   fractional:   x' = -theta g / (|g| + delta)^alpha,  D^beta theta = rho |g|^alpha
///
/// with g = grad f(x). delta only enters the x equation.
struct FlowLaw {
  FlowVariant variant = FlowVariant::FiniteTime;
  double rho = 10.0;
  double alpha = 1.0;
  double lambda = 0.0;  // second order only
  double beta = 0.5;    // fractional only
  double delta = 0.01;

  static FlowLaw finite_time(double rho, double alpha, double delta = 0.01);
  static FlowLaw second_order(double rho, double alpha, double lambda, double delta = 0.01);
  static FlowLaw fractional(double rho, double alpha, double beta, double delta = 0.01);

  /// Throws DomainError when a parameter is out of range.
  void validate() const;
  bool has_gain() const noexcept { return variant != FlowVariant::FiniteTime; }
};

struct FlowState {
  Vector x;
  double theta = 0.0;  // ignored by the finite-time law
};

/// For the fractional law `dtheta` is the Caputo right-hand side.
struct StateDerivative {
  Vector dx;
  double dtheta = 0.0;
};

StateDerivative vector_field(const FlowLaw& law, const Problem& problem, const FlowState& state);

/// Allocation-free core of vector_field. Evaluates the gradient into `grad`,
/// writes x' into `dx`, and returns |g|. `gain` is theta for the gain-driven
/// laws and ignored for the finite-time law. Throws SingularityError when
/// delta = 0 and g = 0.
double position_field(const FlowLaw& law, const Problem& problem, const Vector& x, double gain,
                      Vector& grad, Vector& dx);

/// theta' (or the Caputo right-hand side) given |g| and theta. Zero for the
/// finite-time law.
double gain_rate(const FlowLaw& law, double grad_norm, double theta);

enum class BoundKind {
  FiniteTimeQuadraticRate,  // alpha = 2, L d^2 / (2 rho)
  FiniteTimeGeneral,        // alpha < 2, L d^alpha / (rho mu^(2-alpha) alpha)
  SecondOrderFixedTime,
  FractionalFixedTime,
};

std::string_view bound_kind_name(BoundKind k);

struct BoundInputs {
  std::optional<double> lipschitz;
  std::optional<double> strong_convexity;
  std::optional<double> rho;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<double> beta;
  std::optional<double> distance;
};

struct BoundReport {
  BoundKind kind;
  double bound = 0.0;
  BoundInputs inputs;
  /// Second reading of the same estimate, when the closed form is ambiguous.
  std::optional<double> alternate_bound;
  std::string note;
  std::optional<double> observed;
};

/// Finite-time law. alpha = 2 needs only L; alpha < 2 also needs mu and
/// throws InsufficientConstantsError without it.
BoundReport bound_finite_time(double lipschitz, std::optional<double> strong_convexity, double rho,
                              double alpha, double distance);

/// pi / sqrt(4 rho mu^2 / (alpha L) - lambda^2 / 4). Requires
/// lambda^2 < 8 rho mu^2 / (alpha L); throws ConditionNotMetError otherwise.
BoundReport bound_fixed_time_second_order(double lipschitz, double strong_convexity, double rho,
                                          double alpha, double lambda);

/// First positive zero of E_{beta+1,1}(-c t^(beta+1)) with c = 4 rho mu^2 / (alpha L).
BoundReport bound_fixed_time_fractional(double lipschitz, double strong_convexity, double rho,
                                        double alpha, double beta,
                                        const special::ZeroSearchOptions& search = {});

struct BoundAttempt {
  std::optional<BoundReport> report;
  std::string unavailable_reason;
};

/// Bound matching the law, using the constants attached to the problem.
/// Never throws for missing constants or unmet conditions; those end up in
/// `unavailable_reason`.
BoundAttempt applicable_bound(const FlowLaw& law, const Problem& problem, const Vector& x0);

}  // namespace gradflow
