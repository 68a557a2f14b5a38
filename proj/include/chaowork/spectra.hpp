#pragma once

#include <cstddef>
#include <vector>

#include "chaowork/characteristic.hpp"

namespace chaowork {

/// Binned P(W) on the dual W-grid of a FourierGrid. `batch_density` holds
/// per-batch histograms (weights `batch_counts`) when the source grid carried
/// batches; it drives jackknife errors of nonlinear functionals.
struct WorkHistogram {
  FourierGrid grid;
  double w_min = 0.0;
  double w_max = 0.0;
  double bin_width = 0.0;
  double broadening = 0.0;
  std::vector<double> w;
  std::vector<double> density;
  std::vector<double> error;
  double total_mass = 0.0;
  double imag_residue = 0.0;  // max |Im| / max |Re| of the raw inverse
  std::vector<std::vector<double>> batch_density;
  std::vector<double> batch_counts;

  /// Sum of W density bin_width.
  double mean() const;
  /// True when density >= -3 error in every bin.
  bool nonnegative_within_noise() const;
};

struct InvertOptions {
  bool check_aliasing = true;
  double aliasing_threshold = 0.01;
};

/// Default broadening: twice the W bin width of the grid.
double default_broadening(const FourierGrid& grid);

/// Discrete inverse transform P(W_j) = (du / 2 pi) sum_k G(u_k) exp(-i u_k W_j)
/// after conjugate symmetrization and optional Gaussian damping
/// exp(-broadening^2 u^2 / 2). Throws AsymmetricGrid when u_values do not
/// follow the FourierGrid layout, AliasingSuspect when the damped |G| at u_max
/// exceeds the threshold.
WorkHistogram invert(const CharacteristicGrid& g, double broadening,
                     const InvertOptions& options = {});

/// Forward transform of a histogram back onto the u-grid (no damping removal).
std::vector<std::complex<double>> forward_transform(const WorkHistogram& hist);

}  // namespace chaowork
