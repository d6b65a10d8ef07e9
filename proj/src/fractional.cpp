#include "gradflow/fractional.hpp"

#include <cmath>

#include <fmt/format.h>

#include "gradflow/error.hpp"
#include "gradflow/special_fn.hpp"

namespace gradflow::fractional {

namespace {

void require_order(double beta) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw DomainError(fmt::format("Caputo order must lie in (0, 1], got {}", beta));
}

// (m+1)^beta - m^beta, written to avoid cancellation for large m.
double predictor_weight(double beta, std::size_t m) {
  if (m == 0) return 1.0;
  const double next = static_cast<double>(m) + 1.0;
  return -std::pow(next, beta) * std::expm1(beta * std::log1p(-1.0 / next));
}

// Second difference (m+2)^p + m^p - 2 (m+1)^p with p = beta + 1. For large m
// the binomial series 2 (m+1)^p sum_k C(p, 2k) u^{2k}, u = 1/(m+1), keeps full
// precision.
double corrector_weight(double beta, std::size_t m) {
  const double p = beta + 1.0;
  const double mid = static_cast<double>(m) + 1.0;
  if (m < 8) {
    return std::pow(mid + 1.0, p) + std::pow(mid - 1.0, p) - 2.0 * std::pow(mid, p);
  }
  const double u = 1.0 / mid;
  const double u2 = u * u;
  double coeff = 1.0;  // C(p, 2k)
  double upow = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 30; ++k) {
    const double a = 2.0 * k - 2.0;
    coeff *= (p - a) * (p - a - 1.0) / ((a + 1.0) * (a + 2.0));
    upow *= u2;
    const double term = coeff * upow;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return 2.0 * std::pow(mid, p) * sum;
}

// n^(beta+1) - (n - beta)(n+1)^beta, the weight of f_0 when stepping to n+1.
double first_corrector_weight(double beta, std::size_t n) {
  if (n == 0) return beta;
  const double next = static_cast<double>(n) + 1.0;
  const double em = std::expm1(beta * std::log1p(-1.0 / next));  // (n/(n+1))^beta - 1
  return std::pow(next, beta) * (static_cast<double>(n) * em + beta);
}

}  // namespace

std::vector<double> memory_weights(double beta, std::size_t n) {
  require_order(beta);
  if (n == 0) return {0.0};
  // Weights for the step (n-1) -> n: a_{0,n}, c(n-2), ..., c(0), 1.
  const double scale = 1.0 / special::gamma(beta + 2.0);
  std::vector<double> w(n + 1);
  w[0] = first_corrector_weight(beta, n - 1) * scale;
  for (std::size_t j = 1; j < n; ++j) w[j] = corrector_weight(beta, n - 1 - j) * scale;
  w[n] = scale;
  return w;
}

CaputoChannel::CaputoChannel(double beta, double step, double initial_value, Execution exec)
    : beta_(beta), step_(step), initial_(initial_value), value_(initial_value), exec_(exec) {
  require_order(beta);
  if (!(step > 0.0) || !std::isfinite(step))
    throw DomainError(fmt::format("Caputo channel: step must be positive, got {}", step));
  const double hb = std::pow(step, beta);
  predictor_scale_ = hb / special::gamma(beta + 1.0);
  corrector_scale_ = hb / special::gamma(beta + 2.0);
}

void CaputoChannel::start(double rhs0) {
  if (started()) throw InconsistentStateError("Caputo channel already started");
  history_.push_back(rhs0);
}

void CaputoChannel::require_started(const char* what) const {
  if (!started())
    throw InconsistentStateError(
        fmt::format("Caputo channel: {} called before the initial right-hand side was recorded",
                    what));
}

void CaputoChannel::grow_tables(std::size_t n) const {
  while (predictor_weights_.size() <= n)
    predictor_weights_.push_back(predictor_weight(beta_, predictor_weights_.size()));
  while (corrector_weights_.size() < n)
    corrector_weights_.push_back(corrector_weight(beta_, corrector_weights_.size()));
}

double CaputoChannel::predict() const {
  require_started("predict");
  const std::size_t n = history_.size() - 1;
  grow_tables(n);
  const std::span<const double> weights(predictor_weights_.data(), n + 1);
  return initial_ + predictor_scale_ * kernels::convolve_reversed(weights, history_, exec_);
}

double CaputoChannel::advance(double rhs_next) {
  require_started("advance");
  const std::size_t n = history_.size() - 1;
  grow_tables(n);
  double memory = first_corrector_weight(beta_, n) * history_.front();
  if (n > 0) {
    const std::span<const double> weights(corrector_weights_.data(), n);
    const std::span<const double> tail(history_.data() + 1, n);
    memory += kernels::convolve_reversed(weights, tail, exec_);
  }
  value_ = initial_ + corrector_scale_ * (memory + rhs_next);
  history_.push_back(rhs_next);
  return value_;
}

void CaputoChannel::reevaluate(double rhs_corrected) {
  if (history_.size() < 2)
    throw InconsistentStateError("CaputoChannel::reevaluate called before advance");
  history_.back() = rhs_corrected;
}

double caputo_advance(double beta, double initial_value, std::span<const double> rhs_history,
                      double step, double rhs_next) {
  if (rhs_history.empty())
    throw InconsistentStateError("caputo_advance: empty right-hand-side history");
  CaputoChannel channel(beta, step, initial_value, Execution::Serial);
  channel.start(rhs_history.front());
  // Replay the stored samples; only the final corrector value matters.
  for (std::size_t j = 1; j < rhs_history.size(); ++j) channel.advance(rhs_history[j]);
  return channel.advance(rhs_next);
}

std::vector<double> solve_caputo(double beta, double initial_value,
                                 const std::function<double(double, double)>& rhs, double step,
                                 std::size_t steps, Execution exec) {
  CaputoChannel channel(beta, step, initial_value, exec);
  std::vector<double> out;
  out.reserve(steps + 1);
  out.push_back(initial_value);
  channel.start(rhs(0.0, initial_value));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_next = static_cast<double>(k + 1) * step;
    const double predicted = channel.predict();
    const double corrected = channel.advance(rhs(t_next, predicted));
    channel.reevaluate(rhs(t_next, corrected));
    out.push_back(corrected);
  }
  return out;
}

}  // namespace gradflow::fractional
