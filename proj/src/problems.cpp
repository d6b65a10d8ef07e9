#include "gradflow/problems.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "gradflow/error.hpp"

namespace gradflow {

Problem::Problem(std::string name, Eigen::Index dimension, ValueFn value, GradientFn gradient)
    : name_(std::move(name)),
      dimension_(dimension),
      value_(std::move(value)),
      gradient_(std::move(gradient)) {
  if (dimension_ < 1) throw DomainError(fmt::format("problem '{}': dimension must be >= 1", name_));
  if (!value_ || !gradient_)
    throw DomainError(fmt::format("problem '{}': value and gradient oracles are required", name_));
}

Problem Problem::from_value(std::string name, Eigen::Index dimension, ValueFn value) {
  auto grad = [value](const Vector& x, Vector& out) {
    out = central_difference_gradient(value, x);
  };
  return Problem(std::move(name), dimension, value, std::move(grad));
}

Problem Problem::with_minimizer(Vector minimizer) const {
  check_dimension(minimizer);
  Problem copy = *this;
  copy.minimizer_ = std::move(minimizer);
  return copy;
}

Problem Problem::with_constants(std::optional<double> lipschitz,
                                std::optional<double> strong_convexity,
                                double curvature_scale) const {
  if (lipschitz && !(*lipschitz > 0.0))
    throw DomainError(fmt::format("problem '{}': L must be positive", name_));
  if (strong_convexity && !(*strong_convexity > 0.0))
    throw DomainError(fmt::format("problem '{}': mu must be positive", name_));
  if (lipschitz && strong_convexity && *strong_convexity > *lipschitz)
    throw DomainError(fmt::format("problem '{}': mu = {} exceeds L = {}", name_,
                                  *strong_convexity, *lipschitz));
  Problem copy = *this;
  copy.lipschitz_ = lipschitz;
  copy.strong_convexity_ = strong_convexity;
  copy.curvature_scale_ = curvature_scale;
  return copy;
}

void Problem::check_dimension(const Vector& x) const {
  if (x.size() != dimension_)
    throw DomainError(fmt::format("problem '{}': expected a vector of size {}, got {}", name_,
                                  dimension_, x.size()));
}

double Problem::value(const Vector& x) const {
  check_dimension(x);
  return value_(x);
}

Vector Problem::gradient(const Vector& x) const {
  Vector out(dimension_);
  gradient(x, out);
  return out;
}

void Problem::gradient(const Vector& x, Vector& out) const {
  check_dimension(x);
  out.resize(dimension_);
  gradient_(x, out);
}

Vector central_difference_gradient(const Problem::ValueFn& value, const Vector& x, double step) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + step;
    const double up = value(probe);
    probe[i] = xi - step;
    const double down = value(probe);
    probe[i] = xi;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

Problem quadratic_problem(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DomainError(fmt::format("quadratic: matrix must be square, got {}x{}", a.rows(), a.cols()));
  if (!a.allFinite()) throw DomainError("quadratic: matrix has non-finite entries");
  const Matrix sym = 0.5 * (a + a.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0))
    throw DomainError(fmt::format(
        "quadratic: symmetric part must be positive definite (smallest eigenvalue {})", lo));

  const Matrix twice_sym = 2.0 * sym;
  const Eigen::Index n = a.rows();
  Problem p(
      "quadratic", n, [a](const Vector& x) { return x.dot(a * x); },
      [twice_sym](const Vector& x, Vector& out) { out.noalias() = twice_sym * x; });
  return p.with_minimizer(Vector::Zero(n)).with_constants(hi, lo, 2.0);
}

Matrix reference_quadratic_matrix() {
  Matrix a(2, 2);
  a << 1.0, 1.0, 1.0, 4.0;
  return a;
}

Problem zakharov_problem(Eigen::Index n) {
  if (n < 1) throw DomainError(fmt::format("zakharov: dimension must be >= 1, got {}", n));
  const Vector weights = 0.5 * Vector::LinSpaced(n, 1.0, static_cast<double>(n));
  auto value = [weights](const Vector& x) {
    const double s = weights.dot(x);
    const double s2 = s * s;
    return x.squaredNorm() + s2 + s2 * s2;
  };
  auto grad = [weights](const Vector& x, Vector& out) {
    const double s = weights.dot(x);
    out = 2.0 * x + (2.0 * s + 4.0 * s * s * s) * weights;
  };
  return Problem("zakharov", n, value, grad).with_minimizer(Vector::Zero(n));
}

}  // namespace gradflow
