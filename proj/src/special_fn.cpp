#include "gradflow/special_fn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gradflow/error.hpp"

namespace gradflow::special {

namespace {

using std::numbers::pi;
using Complex = std::complex<double>;

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double xm1) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm1 + static_cast<double>(i));
  return a;
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(fmt::format("{}: argument must be finite and positive, got {}", what, x));
}

}  // namespace

double gamma(double x) {
  require_positive(x, "gamma");
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma(1.0 - x));
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  // t^(x-1/2) split in two halves so the power stays finite up to x ~ 171.
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * lanczos_sum(xm1);
}

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) return std::log(pi / std::abs(std::sin(pi * x))) - log_gamma(1.0 - x);
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

void MLSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !(beta > 0.0) || !std::isfinite(beta))
    throw DomainError(
        fmt::format("Mittag-Leffler orders must be positive, got alpha={} beta={}", alpha, beta));
}

double ml_series_radius(double alpha) { return std::min(10.0, std::pow(10.0, alpha)); }

double ml_series(const MLSpec& spec, double z) {
  spec.validate();
  if (!std::isfinite(z)) throw DomainError(fmt::format("ml_series: non-finite argument {}", z));

  double sum = 0.0;
  double largest = 0.0;
  double power = 1.0;  // z^k
  bool converged = false;
  for (int k = 0; k < kSeriesMaxTerms; ++k) {
    const double arg = spec.alpha * k + spec.beta;
    double term;
    if (arg < 170.0) {
      term = power / gamma(arg);
    } else {
      const double mag = k * std::log(std::abs(z)) - log_gamma(arg);
      term = (power < 0.0 ? -1.0 : 1.0) * std::exp(mag);
    }
    sum += term;
    largest = std::max(largest, std::abs(term));
    if (k > 0 && std::abs(term) < 1e-16 * std::abs(sum)) {
      converged = true;
      break;
    }
    power *= z;
    if (power == 0.0) {  // z == 0
      converged = true;
      break;
    }
  }
  if (!converged)
    throw PrecisionLossError(fmt::format(
        "ml_series: no convergence in {} terms (alpha={}, beta={}, z={})", kSeriesMaxTerms,
        spec.alpha, spec.beta, z));
  // Rounding in the largest term is the dominant error when terms cancel.
  const double estimate = 4.0 * std::numeric_limits<double>::epsilon() * largest;
  if (estimate > 1e-9 * std::max(1.0, std::abs(sum)))
    throw PrecisionLossError(fmt::format(
        "ml_series: cancellation error estimate {:.3g} too large (alpha={}, beta={}, z={})",
        estimate, spec.alpha, spec.beta, z));
  return sum;
}

namespace {

// Laplace-transform inversion on the parabola s(u) = mu (1 + i u)^2,
// u = h k, k = -N..N. The integrand is e^s s^(alpha-beta) / (s^alpha - z).
// Singularities (origin plus poles z^(1/alpha) e^{2 pi i j / alpha}) split the
// plane into regions; in each region the parameters (mu, h, N) are balanced
// between discretization and round-off error, and the region needing the
// fewest nodes wins. Poles to the right of the chosen contour contribute
// residues (1/alpha) s*^(1-beta) e^{s*}.

const double kLogEps = std::log(std::numeric_limits<double>::epsilon());
constexpr double kTargetTolerance = 1e-15;
constexpr double kMaxNodes = 200.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct ContourParams {
  double mu = 0.0;
  double h = 0.0;
  double nodes = kInf;
};

// Region bounded by singularities with weights phi_j < phi_j1 and strengths p, q.
ContourParams params_bounded_region(double phi_j, double phi_j1, double p, double q,
                                    double log_epsilon) {
  constexpr double fac = 1.01;
  const double f_max = std::exp(log_epsilon - kLogEps);
  const double sq_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt(log_epsilon - kLogEps);
  const double sq_j1 = std::min(std::sqrt(phi_j1), threshold - sq_j);

  double bar_j = 0.0;
  double bar_j1 = 0.0;
  double f_bar = 1.0;
  const bool p_zero = p < 1e-14;
  const bool q_zero = q < 1e-14;
  if (p_zero && q_zero) {
    bar_j = sq_j;
    bar_j1 = sq_j1;
  } else if (p_zero) {
    bar_j = sq_j;
    const double f_min = sq_j > 0.0 ? fac * std::pow(sq_j / (sq_j1 - sq_j), q) : fac;
    if (!(f_min < f_max)) return {};
    f_bar = f_min + f_min / f_max * (f_max - f_min);
    const double fq = std::pow(f_bar, -1.0 / q);
    bar_j1 = (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq);
  } else if (q_zero) {
    bar_j1 = sq_j1;
    const double f_min = fac * std::pow(sq_j1 / (sq_j1 - sq_j), p);
    if (!(f_min < f_max)) return {};
    f_bar = f_min + f_min / f_max * (f_max - f_min);
    const double fp = std::pow(f_bar, -1.0 / p);
    bar_j = (2.0 * sq_j + fp * sq_j1) / (2.0 - fp);
  } else {
    double f_min = fac * (sq_j + sq_j1) / std::pow(sq_j1 - sq_j, std::max(p, q));
    if (!(f_min < f_max)) return {};
    f_min = std::max(f_min, 1.5);
    f_bar = f_min + f_min / f_max * (f_max - f_min);
    const double fp = std::pow(f_bar, -1.0 / p);
    const double fq = std::pow(f_bar, -1.0 / q);
    const double w = -phi_j1 / log_epsilon;
    const double den = 2.0 + w - (1.0 + w) * fp + fq;
    bar_j = ((2.0 + w + fq) * sq_j + fp * sq_j1) / den;
    bar_j1 = (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den;
  }

  const double log_eps_adj = log_epsilon - std::log(f_bar);
  const double w = -bar_j1 * bar_j1 / log_eps_adj;
  ContourParams out;
  out.mu = std::pow(((1.0 + w) * bar_j + bar_j1) / (2.0 + w), 2);
  out.h = -2.0 * pi / log_eps_adj * (bar_j1 - bar_j) / ((1.0 + w) * bar_j + bar_j1);
  out.nodes = std::ceil(std::sqrt(1.0 - log_eps_adj / out.mu) / out.h);
  return out;
}

// Unbounded region to the right of the last singularity.
ContourParams params_unbounded_region(double phi_j, double p, double log_epsilon) {
  const double sq_phi = std::sqrt(phi_j);
  double phi_bar = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
  double sq_bar = std::sqrt(phi_bar);
  constexpr double f_min = 1.0;
  constexpr double f_max = 10.0;
  constexpr double f_tar = 5.0;

  double nodes = 0.0;
  double a = 0.0;
  double sq_mu = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double phi_t = phi_bar;
    const double ratio = log_epsilon / phi_t;
    nodes = std::ceil(phi_t / pi * (1.0 - 1.5 * ratio + std::sqrt(1.0 - 2.0 * ratio)));
    a = pi * nodes / phi_t;
    sq_mu = sq_bar * std::abs(4.0 - a) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a));
    const double f_bar = std::pow((sq_bar - sq_phi) / sq_mu, -p);
    if (p < 1e-14 || (f_min < f_bar && f_bar < f_max)) break;
    sq_bar = std::pow(f_tar, -1.0 / p) * sq_mu + sq_phi;
    phi_bar = sq_bar * sq_bar;
  }

  ContourParams out;
  out.mu = sq_mu * sq_mu;
  out.h = (-3.0 * a - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a)) / (4.0 - a) / nodes;
  out.nodes = nodes;

  // Keep e^mu (the largest integrand magnitude) within the round-off budget.
  const double threshold = log_epsilon - kLogEps;
  if (out.mu > threshold) {
    const double q = std::abs(p) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / p) * std::sqrt(out.mu);
    phi_bar = std::pow(q + sq_phi, 2);
    if (phi_bar < threshold) {
      const double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
      const double u = std::sqrt(-phi_bar / kLogEps);
      out.mu = threshold;
      out.nodes = std::ceil(w * log_epsilon / 2.0 / pi / (u * w - 1.0));
      out.h = w / out.nodes;
    } else {
      out = {};
    }
  }
  return out;
}

struct Singularity {
  Complex point;
  double phi;  // (Re s + |s|) / 2, the weight governing where the contour can pass
};

}  // namespace

double ml_contour(const MLSpec& spec, double z) {
  spec.validate();
  if (!std::isfinite(z)) throw DomainError(fmt::format("ml_contour: non-finite argument {}", z));
  if (std::abs(z) < 1e-15) return 1.0 / gamma(spec.beta);

  const double alpha = spec.alpha;
  const double beta = spec.beta;
  const Complex lambda(z, 0.0);
  const double arg = std::arg(lambda);

  std::vector<Singularity> poles;
  const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - arg / (2.0 * pi)));
  const int kmax = static_cast<int>(std::floor(alpha / 2.0 - arg / (2.0 * pi)));
  const double radius = std::pow(std::abs(z), 1.0 / alpha);
  for (int k = kmin; k <= kmax; ++k) {
    const Complex s = std::polar(radius, (arg + 2.0 * pi * k) / alpha);
    const double phi = 0.5 * (s.real() + std::abs(s));
    if (phi > 1e-15) poles.push_back({s, phi});
  }
  std::stable_sort(poles.begin(), poles.end(),
                   [](const Singularity& a, const Singularity& b) { return a.phi < b.phi; });

  std::vector<Singularity> sing;
  sing.push_back({Complex(0.0, 0.0), 0.0});
  sing.insert(sing.end(), poles.begin(), poles.end());
  const std::size_t count = sing.size();

  std::vector<double> phi(count + 1);
  for (std::size_t j = 0; j < count; ++j) phi[j] = sing[j].phi;
  phi[count] = kInf;
  std::vector<double> p(count, 1.0);
  std::vector<double> q(count, 1.0);
  p[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
  q[count - 1] = kInf;

  double log_epsilon = std::log(kTargetTolerance);
  std::vector<std::size_t> admissible;
  for (std::size_t j = 0; j < count; ++j)
    if (phi[j] < log_epsilon - kLogEps && phi[j] < phi[j + 1]) admissible.push_back(j);
  if (admissible.empty())
    throw PrecisionLossError(fmt::format("ml_contour: no admissible contour (z={})", z));

  std::vector<ContourParams> params(count);
  std::size_t best = admissible.front();
  for (int relax = 0;; ++relax) {
    for (std::size_t j : admissible)
      params[j] = j + 1 < count ? params_bounded_region(phi[j], phi[j + 1], p[j], q[j], log_epsilon)
                                : params_unbounded_region(phi[j], p[j], log_epsilon);
    best = *std::min_element(admissible.begin(), admissible.end(), [&](std::size_t a, std::size_t b) {
      return params[a].nodes < params[b].nodes;
    });
    if (params[best].nodes <= kMaxNodes) break;
    log_epsilon += std::log(10.0);
    if (relax > 8)
      throw PrecisionLossError(
          fmt::format("ml_contour: could not meet tolerance (alpha={}, beta={}, z={})", alpha,
                      beta, z));
  }
  if (log_epsilon > std::log(1e-9))
    throw PrecisionLossError(fmt::format(
        "ml_contour: achievable tolerance {:.1e} exceeds 1e-9 (alpha={}, beta={}, z={})",
        std::exp(log_epsilon), alpha, beta, z));

  const ContourParams& cp = params[best];
  const auto nodes = static_cast<long>(cp.nodes);
  Complex integral(0.0, 0.0);
  for (long k = -nodes; k <= nodes; ++k) {
    const double u = cp.h * static_cast<double>(k);
    const Complex s = cp.mu * std::pow(Complex(1.0, u), 2);
    const Complex ds = Complex(-2.0 * cp.mu * u, 2.0 * cp.mu);
    integral += std::exp(s) * std::pow(s, alpha - beta) / (std::pow(s, alpha) - lambda) * ds;
  }
  integral *= cp.h / (2.0 * pi * Complex(0.0, 1.0));

  Complex residues(0.0, 0.0);
  for (std::size_t j = best + 1; j < count; ++j)
    residues += std::pow(sing[j].point, 1.0 - beta) * std::exp(sing[j].point) / alpha;

  const double value = (integral + residues).real();
  if (!std::isfinite(value))
    throw PrecisionLossError(
        fmt::format("ml_contour: result overflows (alpha={}, beta={}, z={})", alpha, beta, z));
  return value;
}

double ml_eval(const MLSpec& spec, double z) {
  spec.validate();
  if (!std::isfinite(z)) throw DomainError(fmt::format("ml_eval: non-finite argument {}", z));
  if (std::abs(z) <= ml_series_radius(spec.alpha)) return ml_series(spec, z);
  return ml_contour(spec, z);
}

double ml_kernel_eval(const MLSpec& spec, double rho, double t) {
  spec.validate();
  if (!(t >= 0.0) || !std::isfinite(t))
    throw DomainError(fmt::format("ml_kernel_eval: time must be finite and >= 0, got {}", t));
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError(fmt::format("ml_kernel_eval: gain must be positive, got {}", rho));
  if (t == 0.0) {
    if (spec.beta > 1.0) return 0.0;
    if (spec.beta == 1.0) return 1.0;
    throw DomainError("ml_kernel_eval: kernel is singular at t = 0 for beta < 1");
  }
  return std::pow(t, spec.beta - 1.0) * ml_eval(spec, -rho * std::pow(t, spec.alpha));
}

void ZeroQuery::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw DomainError(fmt::format("zero query: alpha must lie in (1, 2), got {}", alpha));
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError(fmt::format("zero query: rho must be positive, got {}", rho));
}

double zero_sampling_step(double alpha, double rho) {
  return std::min(0.01, 0.001 * std::pow(rho, -1.0 / alpha));
}

double ml_zero_form(const ZeroQuery& query, double t) {
  if (query.kind == ZeroKind::Standard)
    return ml_eval({query.alpha, 1.0}, -query.rho * std::pow(t, query.alpha));
  return ml_kernel_eval({query.alpha, query.alpha}, query.rho, t);
}

double ml_first_positive_zero(const ZeroQuery& query, const ZeroSearchOptions& options) {
  query.validate();
  if (!(options.horizon > 0.0) || !(options.tolerance > 0.0))
    throw DomainError("zero search: horizon and tolerance must be positive");

  const double step = zero_sampling_step(query.alpha, query.rho);
  const auto form = [&query](double t) { return ml_zero_form(query, t); };
  const auto last = static_cast<std::size_t>(std::floor(options.horizon / step));

  // Scan in blocks so the parallel path evaluates a batch of grid points at a
  // time; the sign-change search over each batch is serial.
  constexpr std::size_t kBlock = 256;
  double prev = form(step);
  if (prev == 0.0) return step;
  std::size_t index = 1;
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  while (!found && index < last) {
    const std::size_t count = std::min(kBlock, last - index);
    const auto values = kernels::sample_grid(form, 0.0, step, index + 1, count, options.execution);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = values[i];
      if (v == 0.0) return static_cast<double>(index + 1 + i) * step;
      if ((v < 0.0) != (prev < 0.0)) {
        lo = static_cast<double>(index + i) * step;
        hi = static_cast<double>(index + 1 + i) * step;
        found = true;
        break;
      }
      prev = v;
    }
    index += count;
  }
  if (!found)
    throw SearchExhaustedError(
        fmt::format("no sign change of the Mittag-Leffler form before t={} (alpha={}, rho={})",
                    options.horizon, query.alpha, query.rho),
        options.horizon);

  const bool lo_negative = prev < 0.0;
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    const double v = form(mid);
    if (v == 0.0) return mid;
    if ((v < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace gradflow::special
