#include <cmath>
#include <functional>
#include <numeric>

#include <gtest/gtest.h>

#include "gradflow/error.hpp"
#include "gradflow/fractional.hpp"
#include "gradflow/special_fn.hpp"

using namespace gradflow;
using namespace gradflow::fractional;

namespace {

double max_error(double beta, double h, const std::function<double(double, double)>& rhs,
                 double init, const std::function<double(double)>& exact) {
  const auto steps = static_cast<std::size_t>(std::lround(1.0 / h));
  const auto theta = solve_caputo(beta, init, rhs, h, steps);
  double worst = 0.0;
  for (std::size_t k = 0; k <= steps; ++k)
    worst = std::max(worst, std::abs(theta[k] - exact(static_cast<double>(k) * h)));
  return worst;
}

double max_error_constant_rhs(double beta, double h) {
  return max_error(beta, h, [](double, double) { return 1.0; }, 0.0,
                   [beta](double t) { return std::pow(t, beta) / std::tgamma(beta + 1); });
}

}  // namespace

TEST(CaputoSolve, ConstantRightHandSide) {
  const auto theta = solve_caputo(0.5, 0.0, [](double, double) { return 1.0; }, 1e-3, 1000);
  EXPECT_NEAR(theta.back(), 1.0 / std::tgamma(1.5), 2e-3);
  EXPECT_NEAR(1.0 / std::tgamma(1.5), 1.128379, 1e-6);
}

TEST(CaputoSolve, LinearRightHandSide) {
  const auto theta = solve_caputo(0.5, 0.0, [](double t, double) { return t; }, 1e-3, 1000);
  const double exact = std::tgamma(2.0) / std::tgamma(2.5);
  EXPECT_NEAR(exact, 0.7522528, 1e-7);
  EXPECT_NEAR(theta.back(), exact, 2e-3);
}

TEST(CaputoSolve, IntegerOrderIsExactForConstantRate) {
  const auto theta = solve_caputo(1.0, 0.0, [](double, double) { return 3.0; }, 0.01, 200);
  for (std::size_t k = 0; k < theta.size(); ++k)
    EXPECT_NEAR(theta[k], 3.0 * 0.01 * static_cast<double>(k), 1e-12);
}

TEST(CaputoSolve, IntegerOrderIsSecondOrderAccurate) {
  // theta' = cos(t) - theta / 2, theta(0) = 0.3.
  auto rhs = [](double t, double th) { return std::cos(t) - 0.5 * th; };
  auto exact = [](double t) { return 0.4 * std::cos(t) + 0.8 * std::sin(t) - 0.1 * std::exp(-0.5 * t); };
  const double coarse = max_error(1.0, 1e-3, rhs, 0.3, exact);
  const double fine = max_error(1.0, 5e-4, rhs, 0.3, exact);
  EXPECT_LE(coarse, 1e-6);
  EXPECT_GE(coarse / fine, 3.5);
}

TEST(CaputoSolve, ConstantRightHandSideIsReproducedToRounding) {
  for (double beta : {0.2, 0.5, 0.8}) {
    EXPECT_LE(max_error_constant_rhs(beta, 1e-3), 1e-13) << beta;
    EXPECT_LE(max_error_constant_rhs(beta, 5e-4), 1e-13) << beta;
  }
}

TEST(CaputoSolve, ConvergesOnHalvingForQuadraticForcing) {
  // D^beta theta = t^2 has theta = 2 t^(2 + beta) / Gamma(3 + beta).
  for (double beta : {0.2, 0.5, 0.8}) {
    auto rhs = [](double t, double) { return t * t; };
    auto exact = [beta](double t) { return 2.0 * std::pow(t, 2.0 + beta) / std::tgamma(3.0 + beta); };
    const double coarse = max_error(beta, 1e-3, rhs, 0.0, exact);
    const double fine = max_error(beta, 5e-4, rhs, 0.0, exact);
    EXPECT_LE(coarse, 2e-3) << beta;
    EXPECT_GE(coarse / fine, 3.0) << beta;
  }
}

TEST(CaputoSolve, ConvergesOnHalvingForRelaxation) {
  // D^beta theta = -theta, theta(0) = 1 has theta = E_beta(-t^beta).
  for (double beta : {0.2, 0.5, 0.8}) {
    auto rhs = [](double, double th) { return -th; };
    auto exact = [beta](double t) { return special::ml_eval({beta, 1.0}, -std::pow(t, beta)); };
    const double coarse = max_error(beta, 1e-3, rhs, 1.0, exact);
    const double fine = max_error(beta, 5e-4, rhs, 1.0, exact);
    EXPECT_LE(coarse, 1e-2) << beta;
    EXPECT_GE(coarse / fine, 1.5) << beta << " " << coarse << " " << fine;
  }
}

TEST(CaputoSolve, PreservesPositivity) {
  for (double beta : {0.2, 0.5, 0.9}) {
    auto rhs = [](double t, double) { return std::abs(std::sin(7 * t)); };
    const auto theta = solve_caputo(beta, 0.0, rhs, 1e-3, 3000);
    for (double v : theta) ASSERT_GE(v, 0.0);
  }
}

TEST(CaputoSolve, RejectsBadOrderAndStep) {
  auto one = [](double, double) { return 1.0; };
  EXPECT_THROW(solve_caputo(0.0, 0.0, one, 1e-3, 10), DomainError);
  EXPECT_THROW(solve_caputo(1.2, 0.0, one, 1e-3, 10), DomainError);
  EXPECT_THROW(solve_caputo(0.5, 0.0, one, 0.0, 10), DomainError);
}

TEST(MemoryWeights, IntegerOrderGivesTrapezoid) {
  const auto w = memory_weights(1.0, 1);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_DOUBLE_EQ(w[1], 0.5);
  const auto w4 = memory_weights(1.0, 4);
  EXPECT_NEAR(w4[0], 0.5, 1e-15);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(w4[j], 1.0, 1e-15);
  EXPECT_NEAR(w4[4], 0.5, 1e-15);
}

TEST(MemoryWeights, FirstStepClosedForm) {
  EXPECT_EQ(memory_weights(0.5, 0), std::vector<double>{0.0});
  // One step: f_0 weight beta, f_1 weight 1, both over Gamma(beta + 2).
  const auto w = memory_weights(0.5, 1);
  EXPECT_NEAR(w[0], 0.5 / std::tgamma(2.5), 1e-15);
  EXPECT_NEAR(w[1], 1.0 / std::tgamma(2.5), 1e-15);
}

TEST(MemoryWeights, PositiveAndReproduceConstantInput) {
  for (double beta : {0.1, 0.2, 0.5, 0.8, 1.0}) {
    for (std::size_t n : {1u, 2u, 7u, 50u, 3000u}) {
      const auto w = memory_weights(beta, n);
      ASSERT_EQ(w.size(), n + 1);
      for (double v : w) ASSERT_GT(v, 0.0);
      const double sum = std::accumulate(w.begin(), w.end(), 0.0);
      EXPECT_NEAR(sum, std::pow(static_cast<double>(n), beta) / std::tgamma(beta + 1),
                  1e-12 * std::pow(static_cast<double>(n), beta))
          << "beta=" << beta << " n=" << n;
    }
  }
}

TEST(MemoryWeights, LargeIndexWeightsMatchLongDoubleDifferences) {
  const double beta = 0.3;
  const auto w = memory_weights(beta, 20000);
  const long double p = beta + 1.0L;
  const long double g = std::tgamma(static_cast<long double>(beta) + 2.0L);
  for (std::size_t j : {1u, 10u, 500u, 12345u, 19999u}) {
    const long double m = 20000 - 1 - j;
    const long double c =
        std::pow(m + 2, p) + std::pow(m, p) - 2 * std::pow(m + 1, p);
    EXPECT_NEAR(w[j], static_cast<double>(c / g), 1e-9 * static_cast<double>(c / g)) << j;
  }
}

TEST(CaputoChannel, HistoryTracksAcceptedSteps) {
  CaputoChannel ch(0.5, 0.01, 0.0);
  EXPECT_FALSE(ch.started());
  EXPECT_EQ(ch.steps(), 0u);
  ch.start(1.0);
  for (int k = 0; k < 5; ++k) {
    ch.predict();
    ch.advance(1.0);
  }
  EXPECT_EQ(ch.steps(), 5u);
  EXPECT_EQ(ch.history().size(), 6u);
}

TEST(CaputoChannel, RejectsUseBeforeStart) {
  CaputoChannel ch(0.5, 0.01, 0.0);
  EXPECT_THROW(ch.predict(), InconsistentStateError);
  EXPECT_THROW(ch.advance(1.0), InconsistentStateError);
  ch.start(1.0);
  EXPECT_THROW(ch.start(1.0), InconsistentStateError);
}

TEST(CaputoAdvance, EmptyHistoryIsInconsistent) {
  EXPECT_THROW(caputo_advance(0.5, 0.0, {}, 0.01, 1.0), InconsistentStateError);
}

TEST(CaputoAdvance, MatchesChannel) {
  std::vector<double> f;
  CaputoChannel ch(0.7, 0.02, 0.25);
  for (int k = 0; k < 40; ++k) f.push_back(std::sin(0.3 * k) + 1.0);
  ch.start(f[0]);
  for (std::size_t k = 1; k < f.size(); ++k) ch.advance(f[k]);
  const double next = 0.5;
  const double stateless = caputo_advance(0.7, 0.25, f, 0.02, next);
  EXPECT_DOUBLE_EQ(stateless, ch.advance(next));
}

TEST(CaputoChannel, SerialAndParallelAgree) {
  auto rhs = [](double t, double th) { return 1.0 + std::cos(t) - 0.1 * th; };
  const auto serial = solve_caputo(0.4, 0.0, rhs, 1e-3, 6000, Execution::Serial);
  const auto parallel = solve_caputo(0.4, 0.0, rhs, 1e-3, 6000, Execution::Parallel);
  for (std::size_t k = 0; k < serial.size(); ++k)
    ASSERT_NEAR(serial[k], parallel[k], 1e-12 * std::max(1.0, std::abs(serial[k])));
}

TEST(CaputoChannel, ReevaluateNeedsAnAdvancedStep) {
  CaputoChannel ch(0.5, 1e-2, 0.0);
  ch.start(1.0);
  EXPECT_THROW(ch.reevaluate(1.0), InconsistentStateError);
  ch.advance(1.0);
  ch.reevaluate(2.0);
  EXPECT_DOUBLE_EQ(ch.history().back(), 2.0);
  EXPECT_EQ(ch.steps(), 1u);
}
