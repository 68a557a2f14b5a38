#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "chaowork/potential.hpp"
#include "chaowork/sampler.hpp"
#include "chaowork/trajectory.hpp"

namespace chaowork {

/// A u-grid together with its exact Fourier-dual W-grid.
///
/// u_k = (k - n/2) du for k = 0..n-1, so u = 0 sits at index n/2 and the
/// unpaired Nyquist point -u_max at index 0. The dual W-grid has spacing
/// dw = 2 pi / (n du) and starts at w_origin; its window has width 2 pi / du.
struct FourierGrid {
  std::size_t n = 256;
  double du = 0.0;
  double w_origin = 0.0;

  std::size_t zero_index() const { return n / 2; }
  double u(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(n / 2)) * du;
  }
  double u_max() const { return static_cast<double>(n / 2) * du; }
  double dw() const;
  double w(std::size_t j) const { return w_origin + static_cast<double>(j) * dw(); }
  double w_span() const;

  /// n-point grid whose W window spans [w_lo, w_hi] and has W = 0 on a grid point.
  static FourierGrid covering(double w_lo, double w_hi, std::size_t n);
};

/// Grid policy: the window is the range of a pilot work sample widened by
/// `padding` times its span (split evenly on both sides).
FourierGrid plan_fourier_grid(std::span<const double> pilot_work, std::size_t n,
                              double padding = 0.2);

/// Characteristic function of one batch of samples (contiguous index range).
struct CharacteristicBatch {
  std::size_t count = 0;
  std::vector<std::complex<double>> g;
};

/// Sampled G(u) with per-point standard errors of the real and imaginary parts.
/// `batches` holds per-batch estimates for batch-means / jackknife errors of
/// derived quantities; it is empty for exact (quantum) grids.
struct CharacteristicGrid {
  FourierGrid grid;
  std::vector<double> u_values;
  std::vector<std::complex<double>> g_values;
  std::vector<double> stderr_re;
  std::vector<double> stderr_im;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  double hbar = 0.0;  // 0 for classical and quantum grids
  double beta = 0.0;
  std::vector<CharacteristicBatch> batches;

  double stderr_at(std::size_t k) const;
};

/// Empty (zero-valued) grid with u_values filled in.
CharacteristicGrid make_characteristic(const FourierGrid& grid);

struct EstimatorOptions {
  int workers = 0;
  std::size_t batches = 32;
  PropagationOptions propagation;
  /// Samples whose trajectory fails are dropped; above this fraction the run aborts.
  double max_failure_fraction = 1e-3;
};

/// Semiclassical characteristic function: the Boltzmann sample mean of
/// exp(i Delta S(x0, u hbar) / hbar). Each sample is propagated once up to
/// u_max hbar with Delta S checkpointed on the grid; negative u use
/// G(-u) = conj G(u), which is the time-reversal image of the same sample
/// under the momentum-symmetric Boltzmann measure.
///
/// The reduction runs over fixed contiguous batches in index order, so the
/// result is bit-identical for any worker count.
CharacteristicGrid estimate_gsc(const ThermalEnsemble& ensemble, const FourierGrid& grid,
                                double hbar, const BilliardGeometry& geom,
                                const QuenchPotential& pot, const EstimatorOptions& options = {});

/// Energy-shell form: G(u) = sum_m w_m <exp(i Delta S / hbar)>_m with
/// microcanonical sampling on each shell p^2 = E_m and w_m proportional to
/// exp(-beta E_m).
CharacteristicGrid estimate_gsc_shell(double beta, const FourierGrid& grid, double hbar,
                                      const BilliardGeometry& geom, const QuenchPotential& pot,
                                      std::span<const double> shell_energies,
                                      std::size_t samples_per_shell, std::uint64_t seed,
                                      const EstimatorOptions& options = {});

namespace detail {

/// Per-batch sums of cos and sin of phases (and their squares) on u >= 0.
struct PhaseSums {
  std::size_t count = 0;
  std::size_t failed = 0;
  std::vector<double> c, s, cc, ss;
};

/// Assembles a full (mirrored) grid from per-batch phase sums.
CharacteristicGrid assemble(const FourierGrid& grid, const std::vector<PhaseSums>& sums);

}  // namespace detail

}  // namespace chaowork
