#include "chaowork/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaowork/errors.hpp"

namespace chaowork {

std::string to_string(JarzynskiMethod m) {
  switch (m) {
    case JarzynskiMethod::semiclassical: return "semiclassical";
    case JarzynskiMethod::classical_mc: return "classical_mc";
    case JarzynskiMethod::quantum: return "quantum";
  }
  return "unknown";
}

Estimate jarzynski_from_samples(std::span<const double> values, double beta) {
  if (values.empty()) throw Error(ErrorKind::DegenerateMean, "no work samples");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::RangeError, "beta must be positive");
  const double w_min = *std::min_element(values.begin(), values.end());
  if (!std::isfinite(w_min)) throw Error(ErrorKind::DegenerateMean, "non-finite work sample");
  // Shifted exponentials e^{-beta (W - w_min)} lie in (0, 1].
  const double n = static_cast<double>(values.size());
  double mean_m1 = 0.0;  // mean of expm1 keeps small-beta precision
  for (double w : values) mean_m1 += std::expm1(-beta * (w - w_min));
  mean_m1 /= n;
  const double mean = 1.0 + mean_m1;
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw Error(ErrorKind::DegenerateMean, "mean of exp(-beta W) is not positive");
  double var = 0.0;
  for (double w : values) {
    const double d = std::expm1(-beta * (w - w_min)) - mean_m1;
    var += d * d;
  }
  var = values.size() > 1 ? var / (n - 1.0) : 0.0;
  Estimate e;
  e.value = w_min - std::log1p(mean_m1) / beta;
  e.stderr = std::sqrt(var / n) / (beta * mean);
  return e;
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::RangeError, "beta must be positive");
}

double histogram_free_energy(const WorkHistogram& hist, std::span<const double> density, double beta) {
  // Shift by the smallest grid W so that the exponentials stay <= 1.
  const double w0 = hist.w.front();
  double sum = 0.0;
  for (std::size_t j = 0; j < density.size(); ++j)
    sum += std::exp(-beta * (hist.w[j] - w0)) * density[j] * hist.bin_width;
  if (!(sum > 0.0))
    throw Error(ErrorKind::DegenerateMean, "histogram estimate of exp(-beta W) is not positive");
  const double eps = hist.broadening;
  return w0 - std::log(sum) / beta + 0.5 * beta * eps * eps;
}

double jackknife_error(std::span<const double> leave_out) {
  const double k = static_cast<double>(leave_out.size());
  if (leave_out.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : leave_out) mean += v;
  mean /= k;
  double var = 0.0;
  for (double v : leave_out) var += (v - mean) * (v - mean);
  return std::sqrt((k - 1.0) / k * var);
}

}  // namespace

std::vector<std::vector<double>> jackknife_densities(const WorkHistogram& hist) {
  std::vector<std::vector<double>> out;
  const std::size_t nb = hist.batch_density.size();
  if (nb < 2) return out;
  double total = 0.0;
  for (double c : hist.batch_counts) total += c;
  // The full density is the count-weighted mean of the batch densities.
  std::vector<double> sum(hist.density.size(), 0.0);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += hist.batch_counts[b] * hist.batch_density[b][j];
  out.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const double rest = total - hist.batch_counts[b];
    std::vector<double> d(sum.size());
    for (std::size_t j = 0; j < sum.size(); ++j)
      d[j] = (sum[j] - hist.batch_counts[b] * hist.batch_density[b][j]) / rest;
    out.push_back(std::move(d));
  }
  return out;
}

Estimate jarzynski_from_histogram(const WorkHistogram& hist, double beta) {
  check_beta(beta);
  Estimate e;
  e.value = histogram_free_energy(hist, hist.density, beta);
  const auto jack = jackknife_densities(hist);
  std::vector<double> values;
  values.reserve(jack.size());
  for (const auto& d : jack) values.push_back(histogram_free_energy(hist, d, beta));
  e.stderr = jackknife_error(values);
  return e;
}

Estimate jarzynski_from_characteristic(const CharacteristicGrid& g, double beta, double broadening) {
  const double eps = broadening < 0.0 ? default_broadening(g.grid) : broadening;
  return jarzynski_from_histogram(invert(g, eps), beta);
}

namespace {

void check_compatible(const WorkHistogram& a, const WorkHistogram& b) {
  const bool same = a.density.size() == b.density.size() && a.w.size() == b.w.size() &&
                    a.grid.n == b.grid.n && a.bin_width == b.bin_width &&
                    a.broadening == b.broadening && a.w_min == b.w_min;
  if (!same) {
    std::ostringstream msg;
    msg << "histograms differ in grid or broadening (n " << a.grid.n << " vs " << b.grid.n
        << ", dw " << a.bin_width << " vs " << b.bin_width << ", eps " << a.broadening << " vs "
        << b.broadening << ")";
    throw Error(ErrorKind::GridMismatch, msg.str());
  }
}

double l1(std::span<const double> a, std::span<const double> b, double dw) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - b[j]);
  return s * dw;
}

}  // namespace

double l1_distance(const WorkHistogram& a, const WorkHistogram& b) {
  check_compatible(a, b);
  return l1(a.density, b.density, a.bin_width);
}

Estimate l1_distance_with_error(const WorkHistogram& a, const WorkHistogram& b) {
  Estimate e;
  e.value = l1_distance(a, b);
  double var = 0.0;
  std::vector<double> values;
  for (const auto& d : jackknife_densities(a)) values.push_back(l1(d, b.density, a.bin_width));
  var += std::pow(jackknife_error(values), 2);
  values.clear();
  for (const auto& d : jackknife_densities(b)) values.push_back(l1(a.density, d, a.bin_width));
  var += std::pow(jackknife_error(values), 2);
  e.stderr = std::sqrt(var);
  return e;
}

}  // namespace chaowork
