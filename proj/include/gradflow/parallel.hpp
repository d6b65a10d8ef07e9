#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gradflow {

/// Selects between the OpenMP kernels and the serial reference loops they
/// are tested against.
enum class Execution { Serial, Parallel };

namespace kernels {

/// Block length of the parallel reductions. Partial sums are formed per
/// block and then combined in block order, so the parallel result does not
/// depend on the thread count.
inline constexpr std::size_t kReductionBlock = 2048;

/// Sum over m of weights[m] * samples[len - 1 - m]. The spans must have the
/// same length.
///
/// Serial is a plain left-to-right loop. Parallel uses fixed blocks and is
/// bit-for-bit reproducible across thread counts; it agrees with Serial to
/// rounding.
double convolve_reversed(std::span<const double> weights, std::span<const double> samples,
                         Execution exec);

double convolve_reversed_serial(std::span<const double> weights,
                                std::span<const double> samples);
double convolve_reversed_parallel(std::span<const double> weights,
                                  std::span<const double> samples);

/// Evaluates fn at origin + (first + i) * step for i in [0, count). Grid
/// points are formed identically on both paths so the outputs match bitwise.
std::vector<double> sample_grid(const std::function<double(double)>& fn, double origin,
                                double step, std::size_t first, std::size_t count,
                                Execution exec);

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace gradflow
