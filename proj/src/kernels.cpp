#include "gradflow/parallel.hpp"

#include <algorithm>
#include <cassert>
#include <exception>

#ifdef GRADFLOW_HAVE_OPENMP
#include <omp.h>
#endif

namespace gradflow::kernels {

double convolve_reversed_serial(std::span<const double> weights,
                                std::span<const double> samples) {
  assert(weights.size() == samples.size());
  const std::size_t len = weights.size();
  double acc = 0.0;
  for (std::size_t m = 0; m < len; ++m) acc += weights[m] * samples[len - 1 - m];
  return acc;
}

double convolve_reversed_parallel(std::span<const double> weights,
                                  std::span<const double> samples) {
  assert(weights.size() == samples.size());
  const std::size_t len = weights.size();
  const std::size_t blocks = (len + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);

  const auto nblocks = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (nblocks > 1)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(len, lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t m = lo; m < hi; ++m) acc += weights[m] * samples[len - 1 - m];
    partial[static_cast<std::size_t>(b)] = acc;
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double convolve_reversed(std::span<const double> weights, std::span<const double> samples,
                         Execution exec) {
  // Short histories stay on the reference loop; below one block the two
  // paths are identical anyway.
  if (exec == Execution::Serial || weights.size() <= kReductionBlock)
    return convolve_reversed_serial(weights, samples);
  return convolve_reversed_parallel(weights, samples);
}

std::vector<double> sample_grid(const std::function<double(double)>& fn, double origin,
                                double step, std::size_t first, std::size_t count,
                                Execution exec) {
  std::vector<double> out(count);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < count; ++i)
      out[i] = fn(origin + static_cast<double>(first + i) * step);
    return out;
  }
  // Exceptions cannot cross the parallel region; keep the one raised at the
  // lowest index so the rethrown error matches the serial path.
  const auto n = static_cast<std::ptrdiff_t>(count);
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = fn(origin + static_cast<double>(first + k) * step);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

int max_threads() {
#ifdef GRADFLOW_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace gradflow::kernels
