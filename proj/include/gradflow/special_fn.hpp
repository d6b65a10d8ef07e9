#pragma once

#include "gradflow/parallel.hpp"

namespace gradflow::special {

/// Euler gamma function for x > 0 (Lanczos approximation, reflected below 1/2).
/// Throws DomainError for non-positive or non-finite x.
double gamma(double x);

/// log(Gamma(x)) for x > 0.
double log_gamma(double x);

/// Orders of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MLSpec {
  double alpha = 1.0;
  double beta = 1.0;

  /// Throws DomainError unless both orders are finite and positive.
  void validate() const;
};

/// E_{alpha,beta}(z) for real z.
///
/// Inside ml_series_radius(alpha) the defining power series is summed
/// directly; outside it the function is recovered by inverting its Laplace
/// transform along a parabolic contour, with the residues of the poles lying
/// to the right of the contour added back in closed form. Both schemes target
/// an absolute error well below 1e-9 for |z| <= 100 and orders in [0.5, 2].
///
/// Throws DomainError for invalid orders or non-finite z, and
/// PrecisionLossError when the internal error estimate exceeds 1e-9 (for
/// example when the result overflows).
double ml_eval(const MLSpec& spec, double z);

/// Power series only. Stops once a term drops below 1e-16 of the partial sum,
/// or after kSeriesMaxTerms terms (PrecisionLossError if not converged by then).
double ml_series(const MLSpec& spec, double z);

/// Contour inversion only (valid for any z; used outside the series radius).
double ml_contour(const MLSpec& spec, double z);

inline constexpr int kSeriesMaxTerms = 250;

/// Largest |z| handled by the series: 10, reduced to 10^alpha for small
/// alpha where cancellation among terms of size exp(|z|^(1/alpha)) would
/// otherwise eat the double-precision budget.
double ml_series_radius(double alpha);

/// t^(beta-1) * E_{alpha,beta}(-rho * t^alpha), the time-domain partner of
/// s^(alpha-beta) / (s^alpha + rho).
///
/// At t = 0 returns 0 when beta > 1 and 1 when beta == 1. Throws DomainError
/// for t < 0, rho <= 0, and for t = 0 with beta < 1 (the kernel is singular).
double ml_kernel_eval(const MLSpec& spec, double rho, double t);

enum class ZeroKind {
  Standard,  ///< E_{alpha,1}(-rho t^alpha)
  Kernel,    ///< t^(alpha-1) E_{alpha,alpha}(-rho t^alpha)
};

struct ZeroQuery {
  double alpha = 1.5;  ///< in (1, 2)
  double rho = 1.0;    ///< > 0
  ZeroKind kind = ZeroKind::Standard;

  /// Throws DomainError unless 1 < alpha < 2 and rho > 0.
  void validate() const;
};

struct ZeroSearchOptions {
  double horizon = 100.0;    ///< give up past this time
  double tolerance = 1e-9;   ///< final bracket width
  Execution execution = Execution::Parallel;
};

/// Forward-sampling step used to bracket the first zero:
/// min(0.01, 0.001 * rho^(-1/alpha)).
double zero_sampling_step(double alpha, double rho);

/// Smallest t > 0 at which the queried form changes sign.
///
/// The form is sampled forward on a uniform grid until the first sign change
/// and the bracket is then bisected down to options.tolerance. Throws
/// SearchExhaustedError when no sign change occurs before options.horizon.
double ml_first_positive_zero(const ZeroQuery& query, const ZeroSearchOptions& options = {});

/// Value of the queried form at time t.
double ml_zero_form(const ZeroQuery& query, double t);

}  // namespace gradflow::special
