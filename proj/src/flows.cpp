#include "gradflow/flows.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gradflow/error.hpp"

namespace gradflow {

std::string_view variant_name(FlowVariant v) {
  switch (v) {
    case FlowVariant::FiniteTime: return "finite_time";
    case FlowVariant::FixedTimeSecondOrder: return "second_order";
    case FlowVariant::FixedTimeFractional: return "fractional";
  }
  return "unknown";
}

FlowVariant parse_variant(std::string_view name) {
  if (name == "finite_time") return FlowVariant::FiniteTime;
  if (name == "second_order") return FlowVariant::FixedTimeSecondOrder;
  if (name == "fractional") return FlowVariant::FixedTimeFractional;
  throw ConfigError(fmt::format(
      "unknown flow variant '{}' (expected finite_time, second_order or fractional)", name));
}

FlowLaw FlowLaw::finite_time(double rho, double alpha, double delta) {
  FlowLaw law{FlowVariant::FiniteTime, rho, alpha, 0.0, 0.5, delta};
  law.validate();
  return law;
}

FlowLaw FlowLaw::second_order(double rho, double alpha, double lambda, double delta) {
  FlowLaw law{FlowVariant::FixedTimeSecondOrder, rho, alpha, lambda, 0.5, delta};
  law.validate();
  return law;
}

FlowLaw FlowLaw::fractional(double rho, double alpha, double beta, double delta) {
  FlowLaw law{FlowVariant::FixedTimeFractional, rho, alpha, 0.0, beta, delta};
  law.validate();
  return law;
}

void FlowLaw::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError(fmt::format("flow: rho must be positive, got {}", rho));
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw DomainError(fmt::format("flow: alpha must lie in (0, 2], got {}", alpha));
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw DomainError(fmt::format("flow: delta must be non-negative, got {}", delta));
  if (variant == FlowVariant::FixedTimeSecondOrder && (!(lambda >= 0.0) || !std::isfinite(lambda)))
    throw DomainError(fmt::format("flow: lambda must be non-negative, got {}", lambda));
  if (variant == FlowVariant::FixedTimeFractional && !(beta > 0.0 && beta < 1.0))
    throw DomainError(fmt::format("flow: beta must lie in (0, 1), got {}", beta));
}

double position_field(const FlowLaw& law, const Problem& problem, const Vector& x, double gain,
                      Vector& grad, Vector& dx) {
  problem.gradient(x, grad);
  const double norm = grad.norm();
  const double denom = norm + law.delta;
  if (denom == 0.0)
    throw SingularityError("normalized field evaluated at a zero gradient with delta = 0");
  const double scale = law.variant == FlowVariant::FiniteTime ? law.rho : gain;
  dx.noalias() = (-scale / std::pow(denom, law.alpha)) * grad;
  return norm;
}

double gain_rate(const FlowLaw& law, double grad_norm, double theta) {
  switch (law.variant) {
    case FlowVariant::FiniteTime: return 0.0;
    case FlowVariant::FixedTimeSecondOrder:
      return -law.lambda * theta + law.rho * std::pow(grad_norm, law.alpha);
    case FlowVariant::FixedTimeFractional: return law.rho * std::pow(grad_norm, law.alpha);
  }
  return 0.0;
}

StateDerivative vector_field(const FlowLaw& law, const Problem& problem, const FlowState& state) {
  law.validate();
  StateDerivative d;
  Vector grad(problem.dimension());
  d.dx.resize(problem.dimension());
  const double norm = position_field(law, problem, state.x, state.theta, grad, d.dx);
  d.dtheta = gain_rate(law, norm, state.theta);
  return d;
}

std::string_view bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::FiniteTimeQuadraticRate: return "finite_time_alpha2";
    case BoundKind::FiniteTimeGeneral: return "finite_time_general";
    case BoundKind::SecondOrderFixedTime: return "second_order_fixed_time";
    case BoundKind::FractionalFixedTime: return "fractional_fixed_time";
  }
  return "unknown";
}

namespace {

void require_positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(fmt::format("bound: {} must be positive, got {}", name, v));
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw DomainError(fmt::format("bound: alpha must lie in (0, 2], got {}", alpha));
}

}  // namespace

BoundReport bound_finite_time(double lipschitz, std::optional<double> strong_convexity, double rho,
                              double alpha, double distance) {
  require_positive("L", lipschitz);
  require_positive("rho", rho);
  require_alpha(alpha);
  if (!(distance >= 0.0) || !std::isfinite(distance))
    throw DomainError(fmt::format("bound: distance must be non-negative, got {}", distance));

  BoundReport r;
  r.inputs.lipschitz = lipschitz;
  r.inputs.strong_convexity = strong_convexity;
  r.inputs.rho = rho;
  r.inputs.alpha = alpha;
  r.inputs.distance = distance;
  if (alpha == 2.0) {
    r.kind = BoundKind::FiniteTimeQuadraticRate;
    r.bound = lipschitz * distance * distance / (2.0 * rho);
    return r;
  }
  if (!strong_convexity)
    throw InsufficientConstantsError(
        fmt::format("finite-time bound with alpha = {} < 2 needs the strong convexity constant mu",
                    alpha));
  require_positive("mu", *strong_convexity);
  r.kind = BoundKind::FiniteTimeGeneral;
  r.bound = lipschitz * std::pow(distance, alpha) /
            (rho * std::pow(*strong_convexity, 2.0 - alpha) * alpha);
  return r;
}

BoundReport bound_fixed_time_second_order(double lipschitz, double strong_convexity, double rho,
                                          double alpha, double lambda) {
  require_positive("L", lipschitz);
  require_positive("mu", strong_convexity);
  require_positive("rho", rho);
  require_alpha(alpha);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError(fmt::format("bound: lambda must be non-negative, got {}", lambda));

  const double mu2 = strong_convexity * strong_convexity;
  const double limit = 8.0 * rho * mu2 / (alpha * lipschitz);
  if (!(lambda * lambda < limit)) {
    auto inequality = fmt::format("lambda^2 < 8 rho mu^2 / (alpha L): {} < {}", lambda * lambda,
                                  limit);
    throw ConditionNotMetError(
        fmt::format("second-order fixed-time bound needs {}", inequality), inequality);
  }

  BoundReport r;
  r.kind = BoundKind::SecondOrderFixedTime;
  r.inputs.lipschitz = lipschitz;
  r.inputs.strong_convexity = strong_convexity;
  r.inputs.rho = rho;
  r.inputs.alpha = alpha;
  r.inputs.lambda = lambda;
  const double quarter_l2 = 0.25 * lambda * lambda;
  r.bound = std::numbers::pi / std::sqrt(4.0 * rho * mu2 / (alpha * lipschitz) - quarter_l2);
  if (alpha == 2.0) {
    const double wide = 4.0 * rho * mu2 / lipschitz - quarter_l2;
    r.alternate_bound = std::numbers::pi / std::sqrt(wide);
    r.note =
        "alpha = 2: bound uses frequency sqrt(2 rho mu^2 / L - lambda^2 / 4); "
        "alternate_bound uses sqrt(4 rho mu^2 / L - lambda^2 / 4)";
  }
  return r;
}

BoundReport bound_fixed_time_fractional(double lipschitz, double strong_convexity, double rho,
                                        double alpha, double beta,
                                        const special::ZeroSearchOptions& search) {
  require_positive("L", lipschitz);
  require_positive("mu", strong_convexity);
  require_positive("rho", rho);
  require_alpha(alpha);
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError(fmt::format("bound: beta must lie in (0, 1), got {}", beta));

  const double c = 4.0 * rho * strong_convexity * strong_convexity / (alpha * lipschitz);
  BoundReport r;
  r.kind = BoundKind::FractionalFixedTime;
  r.inputs.lipschitz = lipschitz;
  r.inputs.strong_convexity = strong_convexity;
  r.inputs.rho = rho;
  r.inputs.alpha = alpha;
  r.inputs.beta = beta;
  r.bound = special::ml_first_positive_zero({beta + 1.0, c, special::ZeroKind::Standard}, search);
  r.note = fmt::format("first zero of E_{{{},1}}(-{} t^{})", beta + 1.0, c, beta + 1.0);
  return r;
}

BoundAttempt applicable_bound(const FlowLaw& law, const Problem& problem, const Vector& x0) {
  BoundAttempt out;
  const auto lip = problem.lipschitz();
  const auto mu = problem.strong_convexity();
  try {
    switch (law.variant) {
      case FlowVariant::FiniteTime: {
        if (!problem.minimizer()) {
          out.unavailable_reason = "minimizer unknown, so the initial distance is undefined";
          return out;
        }
        if (!lip) {
          out.unavailable_reason = "problem has no Lipschitz constant L";
          return out;
        }
        const double d = (x0 - *problem.minimizer()).norm();
        out.report = bound_finite_time(*lip, mu, law.rho, law.alpha, d);
        return out;
      }
      case FlowVariant::FixedTimeSecondOrder:
      case FlowVariant::FixedTimeFractional: {
        if (!lip || !mu) {
          out.unavailable_reason = "problem lacks L or mu";
          return out;
        }
        if (law.variant == FlowVariant::FixedTimeSecondOrder)
          out.report = bound_fixed_time_second_order(*lip, *mu, law.rho, law.alpha, law.lambda);
        else
          out.report = bound_fixed_time_fractional(*lip, *mu, law.rho, law.alpha, law.beta);
        return out;
      }
    }
  } catch (const InsufficientConstantsError& e) {
    out.unavailable_reason = e.what();
  } catch (const ConditionNotMetError& e) {
    out.unavailable_reason = e.what();
  } catch (const SearchExhaustedError& e) {
    out.unavailable_reason = e.what();
  }
  return out;
}

}  // namespace gradflow
