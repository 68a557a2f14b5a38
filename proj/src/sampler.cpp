#include "chaowork/sampler.hpp"

#include <cmath>
#include <numbers>
#include <omp.h>

#include "chaowork/errors.hpp"

namespace chaowork {

int resolve_workers(int workers) {
  return workers > 0 ? workers : omp_get_max_threads();
}

Vec2 sample_position(const BilliardGeometry& geom, CounterRng& rng) {
  const double wx = geom.x_extent();
  const double wy = geom.y_extent();
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const Vec2 q(wx * rng.uniform(), wy * rng.uniform());
    if (contains(geom, q)) return q;
  }
  throw Error(ErrorKind::RejectionStall, "no accepted position after 10^4 proposals");
}

Vec2 sample_momentum(double beta, CounterRng& rng) {
  if (!(beta > 0.0)) throw Error(ErrorKind::RangeError, "beta must be positive");
  const double radius = std::sqrt(-2.0 * std::log(rng.uniform_open_zero()));
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double scale = std::sqrt(0.5 / beta);
  return {scale * radius * std::cos(angle), scale * radius * std::sin(angle)};
}

PhasePoint sample_phase_point(const BilliardGeometry& geom, double beta, std::uint64_t seed,
                              std::uint64_t index) {
  CounterRng rng(seed, index);
  PhasePoint x;
  x.q = sample_position(geom, rng);
  x.p = sample_momentum(beta, rng);
  return x;
}

PhasePoint sample_shell_point(const BilliardGeometry& geom, double energy, CounterRng& rng) {
  PhasePoint x;
  x.q = sample_position(geom, rng);
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double magnitude = std::sqrt(energy);
  x.p = Vec2(magnitude * std::cos(angle), magnitude * std::sin(angle));
  return x;
}

ThermalEnsemble sample_ensemble(const BilliardGeometry& geom, double beta, std::size_t n,
                                std::uint64_t seed, int workers) {
  if (n < 1) throw Error(ErrorKind::RangeError, "ensemble size must be at least 1");
  if (!(beta > 0.0)) throw Error(ErrorKind::RangeError, "beta must be positive");
  ThermalEnsemble ensemble;
  ensemble.beta = beta;
  ensemble.seed = seed;
  ensemble.points.resize(n);
  const auto count = static_cast<std::int64_t>(n);
  bool stalled = false;
#pragma omp parallel for schedule(static) num_threads(resolve_workers(workers))
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      ensemble.points[static_cast<std::size_t>(k)] =
          sample_phase_point(geom, beta, seed, static_cast<std::uint64_t>(k));
    } catch (const Error&) {
#pragma omp atomic write
      stalled = true;
    }
  }
  if (stalled) throw Error(ErrorKind::RejectionStall, "rejection sampler stalled");
  return ensemble;
}

}  // namespace chaowork
