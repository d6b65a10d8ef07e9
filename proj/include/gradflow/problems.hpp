#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace gradflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Smooth unconstrained objective with a gradient oracle.
///
/// `lipschitz` and `strong_convexity` follow the convention used by the
/// convergence-time bounds: for f(x) = x^T A x they are the extreme
/// eigenvalues of the symmetric part of A. The constants that literally
/// satisfy <grad f(a) - grad f(b), a - b> <= L |a - b|^2 (and the matching
/// lower bound) are these values times `curvature_scale()` (2 for the
/// quadratic form, 1 otherwise).
///
/// Immutable after construction; oracles are pure.
class Problem {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  /// Writes the gradient at x into out (already sized to the dimension).
  using GradientFn = std::function<void(const Vector& x, Vector& out)>;

  Problem(std::string name, Eigen::Index dimension, ValueFn value, GradientFn gradient);

  /// Problem defined by its value alone; the gradient is taken by central
  /// differences with step 1e-6.
  static Problem from_value(std::string name, Eigen::Index dimension, ValueFn value);

  Problem with_minimizer(Vector minimizer) const;
  Problem with_constants(std::optional<double> lipschitz, std::optional<double> strong_convexity,
                         double curvature_scale = 1.0) const;

  const std::string& name() const noexcept { return name_; }
  Eigen::Index dimension() const noexcept { return dimension_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  void gradient(const Vector& x, Vector& out) const;

  const std::optional<Vector>& minimizer() const noexcept { return minimizer_; }
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  std::optional<double> strong_convexity() const noexcept { return strong_convexity_; }
  double curvature_scale() const noexcept { return curvature_scale_; }

 private:
  void check_dimension(const Vector& x) const;

  std::string name_;
  Eigen::Index dimension_;
  ValueFn value_;
  GradientFn gradient_;
  std::optional<Vector> minimizer_;
  std::optional<double> lipschitz_;
  std::optional<double> strong_convexity_;
  double curvature_scale_ = 1.0;
};

/// Central-difference gradient of `value` at x.
Vector central_difference_gradient(const Problem::ValueFn& value, const Vector& x,
                                   double step = 1e-6);

/// f(x) = x^T A x with gradient (A + A^T) x and minimizer 0. Throws DomainError
/// unless A is square with a positive-definite symmetric part.
Problem quadratic_problem(const Matrix& a);

/// The 2x2 reference quadratic [[1, 1], [1, 4]] used throughout the tests and
/// example configs.
Matrix reference_quadratic_matrix();

/// Zakharov function sum x_i^2 + S^2 + S^4 with S = sum 0.5 i x_i (i from 1).
/// Minimizer 0; neither globally Lipschitz-smooth nor strongly convex, so no
/// constants are attached. Throws DomainError for n < 1.
Problem zakharov_problem(Eigen::Index n);

}  // namespace gradflow
