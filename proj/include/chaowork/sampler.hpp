#pragma once

#include <cstdint>
#include <vector>

#include "chaowork/geometry.hpp"
#include "chaowork/rng.hpp"

namespace chaowork {

struct PhasePoint {
  Vec2 q;
  Vec2 p;
};

struct ThermalEnsemble {
  std::vector<PhasePoint> points;
  double beta = 1.0;
  std::uint64_t seed = 0;
};

inline constexpr int kMaxRejections = 10000;

/// Uniform position by rejection from the bounding box.
Vec2 sample_position(const BilliardGeometry& geom, CounterRng& rng);

/// Boltzmann momentum for H0 = p^2 (mass 1/2): independent normals with
/// variance 1/(2 beta), drawn with the basic Box-Muller transform.
Vec2 sample_momentum(double beta, CounterRng& rng);

/// The k-th phase point of the ensemble (geom, beta, seed); uses stream k only.
PhasePoint sample_phase_point(const BilliardGeometry& geom, double beta, std::uint64_t seed,
                              std::uint64_t index);

/// Microcanonical point on the shell p^2 = energy: uniform position, uniform
/// momentum direction.
PhasePoint sample_shell_point(const BilliardGeometry& geom, double energy, CounterRng& rng);

/// n independent Boltzmann phase points; bit-identical for any worker count.
ThermalEnsemble sample_ensemble(const BilliardGeometry& geom, double beta, std::size_t n,
                                std::uint64_t seed, int workers = 0);

/// Resolves a worker count (0 means every available thread).
int resolve_workers(int workers);

}  // namespace chaowork
