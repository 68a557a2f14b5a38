#pragma once

#include <span>
#include <string>

#include "chaowork/characteristic.hpp"
#include "chaowork/spectra.hpp"

namespace chaowork {

struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
};

enum class JarzynskiMethod { semiclassical, classical_mc, quantum };

std::string to_string(JarzynskiMethod m);

struct JarzynskiReport {
  double beta = 0.0;
  double delta_f_estimate = 0.0;
  double delta_f_reference = 0.0;
  double stderr = 0.0;
  JarzynskiMethod method = JarzynskiMethod::classical_mc;
};

/// -ln(mean exp(-beta W)) / beta with a delta-method error. Throws DegenerateMean.
Estimate jarzynski_from_samples(std::span<const double> values, double beta);

/// Same free energy from an inverted histogram: sum exp(-beta W) P(W) dW,
/// divided by the Gaussian broadening factor exp(beta^2 eps^2 / 2).
/// The error is a jackknife over the histogram's batches (0 without batches).
Estimate jarzynski_from_histogram(const WorkHistogram& hist, double beta);

/// Inverts g with the given broadening (default when negative) and applies
/// jarzynski_from_histogram.
Estimate jarzynski_from_characteristic(const CharacteristicGrid& g, double beta,
                                       double broadening = -1.0);

/// Sum |a - b| dw on identical grids. Throws GridMismatch.
double l1_distance(const WorkHistogram& a, const WorkHistogram& b);

/// l1_distance with a jackknife error combining the batches of both inputs.
Estimate l1_distance_with_error(const WorkHistogram& a, const WorkHistogram& b);

/// Leave-one-batch-out densities (empty when the histogram has < 2 batches).
std::vector<std::vector<double>> jackknife_densities(const WorkHistogram& hist);

}  // namespace chaowork
