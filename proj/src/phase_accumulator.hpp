#pragma once

// Internal: batched accumulation of unit phases exp(i theta_j) over samples.

#include <algorithm>
#include <cmath>
#include <exception>
#include <omp.h>
#include <vector>

#include "chaowork/characteristic.hpp"
#include "chaowork/errors.hpp"

namespace chaowork::detail {

inline std::size_t batch_begin(std::size_t b, std::size_t n, std::size_t batches) {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(b) * n) / batches);
}

/// phase_fn(index, span of half+1 phases) fills theta_j for u_j = j du, j = 0..half.
/// Throwing chaowork::Error marks the sample as failed.
template <typename PhaseFn>
std::vector<PhaseSums> accumulate_phases(std::size_t n_samples, std::size_t half,
                                         std::size_t batches, int workers, PhaseFn&& phase_fn) {
  batches = std::max<std::size_t>(1, std::min(batches, n_samples));
  std::vector<PhaseSums> sums(batches);
  std::exception_ptr fatal;
  const auto n_batches = static_cast<std::int64_t>(batches);
#pragma omp parallel num_threads(workers)
  {
    std::vector<double> phases(half + 1);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < n_batches; ++b) {
      PhaseSums& acc = sums[static_cast<std::size_t>(b)];
      acc.c.assign(half + 1, 0.0);
      acc.s.assign(half + 1, 0.0);
      acc.cc.assign(half + 1, 0.0);
      acc.ss.assign(half + 1, 0.0);
      const std::size_t lo = batch_begin(static_cast<std::size_t>(b), n_samples, batches);
      const std::size_t hi = batch_begin(static_cast<std::size_t>(b) + 1, n_samples, batches);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          phase_fn(i, phases);
        } catch (const Error&) {
          ++acc.failed;
          continue;
        } catch (...) {
#pragma omp critical(chaowork_fatal)
          if (!fatal) fatal = std::current_exception();
          continue;
        }
        ++acc.count;
        for (std::size_t j = 0; j <= half; ++j) {
          const double c = std::cos(phases[j]);
          const double s = std::sin(phases[j]);
          acc.c[j] += c;
          acc.s[j] += s;
          acc.cc[j] += c * c;
          acc.ss[j] += s * s;
        }
      }
    }
  }
  if (fatal) std::rethrow_exception(fatal);
  return sums;
}

}  // namespace chaowork::detail
