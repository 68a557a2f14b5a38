#pragma once

#include <cstdint>
#include <vector>

#include "chaowork/characteristic.hpp"
#include "chaowork/potential.hpp"

namespace chaowork {

/// Work values W = (xi_f - xi_0) V(q0) of a sudden quench, one per Boltzmann
/// phase point. Sample k uses the same random stream as sample_phase_point,
/// so it pairs with the k-th point of the ensemble with the same seed.
struct ClassicalWorkSample {
  std::vector<double> values;
  double beta = 1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

ClassicalWorkSample sample_classical_work(const BilliardGeometry& geom, const QuenchPotential& pot,
                                          double beta, std::size_t n, std::uint64_t seed,
                                          int workers = 0);

/// Exact characteristic function of the empirical work sample on the grid,
/// with per-batch estimates (the hbar -> 0 form of the semiclassical estimator).
CharacteristicGrid classical_characteristic(const ClassicalWorkSample& sample,
                                            const FourierGrid& grid, std::size_t batches = 32,
                                            int workers = 0);

/// Z_f / Z_0 = <exp(-beta (xi_f - xi_0) V(q))> over q uniform in the billiard,
/// by composite Gauss-Legendre quadrature on the rectangle and on the quarter
/// disk in polar coordinates, refined until the relative change is below 1e-8.
double partition_ratio(const BilliardGeometry& geom, const QuenchPotential& pot, double beta);

/// -ln(Z_f / Z_0) / beta.
double classical_free_energy_difference(const BilliardGeometry& geom, const QuenchPotential& pot,
                                        double beta);

/// g(E) for H0 = p^2 in a billiard of area A: pi A, independent of E.
double density_of_states(const BilliardGeometry& geom, double energy);

struct WorkSupport {
  double min = 0.0;
  double max = 0.0;
  Vec2 argmin;
  Vec2 argmax;
};

/// Range of (xi_f - xi_0) V over the closed billiard: dense scan at sigma/20
/// followed by projected gradient refinement from the best scan points.
WorkSupport work_support(const BilliardGeometry& geom, const QuenchPotential& pot);

/// Final energies H_f(x0) = E0 + (xi_f - xi_0) V(q0) for points sampled
/// uniformly on the shell H0 = E0. Their histogram is the conditional
/// distribution of final energies given E0; used to validate the W = Delta H
/// shortcut.
std::vector<double> shell_final_energies(const BilliardGeometry& geom, const QuenchPotential& pot,
                                         double energy, std::size_t n, std::uint64_t seed);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(std::size_t order);

}  // namespace chaowork
