#include "chaowork/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chaowork/errors.hpp"
#include "phase_accumulator.hpp"

namespace chaowork {

double FourierGrid::dw() const { return 2.0 * std::numbers::pi / (static_cast<double>(n) * du); }

double FourierGrid::w_span() const { return 2.0 * std::numbers::pi / du; }

FourierGrid FourierGrid::covering(double w_lo, double w_hi, std::size_t n) {
  if (n < 4 || n % 2 != 0) throw Error(ErrorKind::RangeError, "u-grid size must be even and >= 4");
  if (!(w_hi > w_lo) || !std::isfinite(w_lo) || !std::isfinite(w_hi))
    throw Error(ErrorKind::RangeError, "work window must have positive width");
  FourierGrid grid;
  grid.n = n;
  const double dw = (w_hi - w_lo) / static_cast<double>(n - 1);
  grid.du = 2.0 * std::numbers::pi / (static_cast<double>(n) * dw);
  grid.w_origin = std::floor(w_lo / dw) * dw;
  return grid;
}

FourierGrid plan_fourier_grid(std::span<const double> pilot_work, std::size_t n, double padding) {
  if (pilot_work.empty()) throw Error(ErrorKind::RangeError, "pilot work sample is empty");
  const auto [lo_it, hi_it] = std::minmax_element(pilot_work.begin(), pilot_work.end());
  double lo = std::min(*lo_it, 0.0);
  double hi = std::max(*hi_it, 0.0);
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;
  lo -= 0.5 * padding * span;
  hi += 0.5 * padding * span;
  return FourierGrid::covering(lo, hi, n);
}

double CharacteristicGrid::stderr_at(std::size_t k) const {
  return std::hypot(stderr_re[k], stderr_im[k]);
}

CharacteristicGrid make_characteristic(const FourierGrid& grid) {
  CharacteristicGrid g;
  g.grid = grid;
  g.u_values.resize(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) g.u_values[k] = grid.u(k);
  g.g_values.assign(grid.n, {0.0, 0.0});
  g.stderr_re.assign(grid.n, 0.0);
  g.stderr_im.assign(grid.n, 0.0);
  return g;
}

namespace detail {

namespace {

// Mirrors positive-u values onto the full grid.
std::vector<std::complex<double>> mirror(const FourierGrid& grid,
                                         const std::vector<std::complex<double>>& half) {
  const std::size_t mid = grid.n / 2;
  std::vector<std::complex<double>> full(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    full[k] = k >= mid ? half[k - mid] : std::conj(half[mid - k]);
  }
  return full;
}

}  // namespace

CharacteristicGrid assemble(const FourierGrid& grid, const std::vector<PhaseSums>& sums) {
  CharacteristicGrid out = make_characteristic(grid);
  const std::size_t half = grid.n / 2;
  std::vector<double> c(half + 1, 0.0), s(half + 1, 0.0), cc(half + 1, 0.0), ss(half + 1, 0.0);
  std::size_t count = 0;
  for (const PhaseSums& b : sums) {
    count += b.count;
    out.n_failed += b.failed;
    for (std::size_t j = 0; j <= half; ++j) {
      c[j] += b.c[j];
      s[j] += b.s[j];
      cc[j] += b.cc[j];
      ss[j] += b.ss[j];
    }
  }
  out.n_samples = count;
  if (count == 0) throw Error(ErrorKind::SampleFailureRate, "no sample completed");

  const double n = static_cast<double>(count);
  std::vector<std::complex<double>> mean(half + 1);
  std::vector<double> err_re(half + 1, 0.0), err_im(half + 1, 0.0);
  for (std::size_t j = 0; j <= half; ++j) {
    mean[j] = {c[j] / n, s[j] / n};
    if (count > 1) {
      const double var_re = std::max(0.0, (cc[j] - n * mean[j].real() * mean[j].real()) / (n - 1.0));
      const double var_im = std::max(0.0, (ss[j] - n * mean[j].imag() * mean[j].imag()) / (n - 1.0));
      err_re[j] = std::sqrt(var_re / n);
      err_im[j] = std::sqrt(var_im / n);
    }
  }
  out.g_values = mirror(grid, mean);
  const std::size_t mid = grid.n / 2;
  for (std::size_t k = 0; k < grid.n; ++k) {
    const std::size_t j = k >= mid ? k - mid : mid - k;
    out.stderr_re[k] = err_re[j];
    out.stderr_im[k] = err_im[j];
  }

  for (const PhaseSums& b : sums) {
    if (b.count == 0) continue;
    std::vector<std::complex<double>> bm(half + 1);
    const double bn = static_cast<double>(b.count);
    for (std::size_t j = 0; j <= half; ++j) bm[j] = {b.c[j] / bn, b.s[j] / bn};
    out.batches.push_back({b.count, mirror(grid, bm)});
  }
  return out;
}

}  // namespace detail

namespace {

void check_failures(const CharacteristicGrid& g, double max_fraction) {
  const double total = static_cast<double>(g.n_samples + g.n_failed);
  if (static_cast<double>(g.n_failed) > max_fraction * total) {
    std::ostringstream msg;
    msg << g.n_failed << " of " << g.n_samples + g.n_failed << " trajectories failed";
    throw Error(ErrorKind::SampleFailureRate, msg.str());
  }
}

void check_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar))
    throw Error(ErrorKind::RangeError, "hbar must be positive and finite");
}

}  // namespace

CharacteristicGrid estimate_gsc(const ThermalEnsemble& ensemble, const FourierGrid& grid,
                                double hbar, const BilliardGeometry& geom,
                                const QuenchPotential& pot, const EstimatorOptions& options) {
  check_hbar(hbar);
  const std::size_t half = grid.n / 2;
  std::vector<double> times(half + 1);
  for (std::size_t j = 0; j <= half; ++j) times[j] = static_cast<double>(j) * grid.du * hbar;

  auto sums = detail::accumulate_phases(
      ensemble.points.size(), half, options.batches, resolve_workers(options.workers),
      [&](std::size_t i, std::vector<double>& phases) {
        const auto ds =
            action_difference_series(ensemble.points[i], times, geom, pot, options.propagation);
        for (std::size_t j = 0; j <= half; ++j) phases[j] = ds[j] / hbar;
      });
  CharacteristicGrid out = detail::assemble(grid, sums);
  out.hbar = hbar;
  out.beta = ensemble.beta;
  check_failures(out, options.max_failure_fraction);
  return out;
}

CharacteristicGrid estimate_gsc_shell(double beta, const FourierGrid& grid, double hbar,
                                      const BilliardGeometry& geom, const QuenchPotential& pot,
                                      std::span<const double> shell_energies,
                                      std::size_t samples_per_shell, std::uint64_t seed,
                                      const EstimatorOptions& options) {
  check_hbar(hbar);
  if (!(beta > 0.0)) throw Error(ErrorKind::RangeError, "beta must be positive");
  if (shell_energies.empty()) throw Error(ErrorKind::RangeError, "shell list is empty");
  if (samples_per_shell < 1) throw Error(ErrorKind::RangeError, "samples_per_shell must be >= 1");
  for (std::size_t m = 0; m < shell_energies.size(); ++m) {
    if (!(shell_energies[m] > 0.0) || (m > 0 && !(shell_energies[m] > shell_energies[m - 1])))
      throw Error(ErrorKind::RangeError, "shell energies must be positive and increasing");
  }

  const std::size_t half = grid.n / 2;
  std::vector<double> times(half + 1);
  for (std::size_t j = 0; j <= half; ++j) times[j] = static_cast<double>(j) * grid.du * hbar;

  // Boltzmann weights relative to the lowest shell.
  std::vector<double> weights(shell_energies.size());
  double norm = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    weights[m] = std::exp(-beta * (shell_energies[m] - shell_energies[0]));
    norm += weights[m];
  }
  for (double& w : weights) w /= norm;

  const std::size_t n_batches = std::max<std::size_t>(1, std::min(options.batches, samples_per_shell));
  CharacteristicGrid out = make_characteristic(grid);
  std::vector<std::vector<std::complex<double>>> batch_g(
      n_batches, std::vector<std::complex<double>>(half + 1));
  std::vector<std::complex<double>> total(half + 1);
  std::vector<double> var_re(half + 1, 0.0), var_im(half + 1, 0.0);

  for (std::size_t m = 0; m < shell_energies.size(); ++m) {
    const std::uint64_t shell_seed = derive_seed(seed, m);
    const double energy = shell_energies[m];
    auto sums = detail::accumulate_phases(
        samples_per_shell, half, n_batches, resolve_workers(options.workers),
        [&](std::size_t i, std::vector<double>& phases) {
          CounterRng rng(shell_seed, i);
          const PhasePoint x0 = sample_shell_point(geom, energy, rng);
          const auto ds = action_difference_series(x0, times, geom, pot, options.propagation);
          for (std::size_t j = 0; j <= half; ++j) phases[j] = ds[j] / hbar;
        });
    CharacteristicGrid shell = detail::assemble(grid, sums);
    check_failures(shell, options.max_failure_fraction);
    out.n_samples += shell.n_samples;
    out.n_failed += shell.n_failed;
    const std::size_t mid = grid.n / 2;
    for (std::size_t j = 0; j <= half; ++j) {
      // +u_max is not stored; read every point through the conjugate mirror
      total[j] += weights[m] * std::conj(shell.g_values[mid - j]);
      var_re[j] += weights[m] * weights[m] * shell.stderr_re[mid - j] * shell.stderr_re[mid - j];
      var_im[j] += weights[m] * weights[m] * shell.stderr_im[mid - j] * shell.stderr_im[mid - j];
    }
    for (std::size_t b = 0; b < n_batches && b < shell.batches.size(); ++b) {
      for (std::size_t j = 0; j <= half; ++j)
        batch_g[b][j] += weights[m] * std::conj(shell.batches[b].g[mid - j]);
    }
  }

  const std::size_t mid = grid.n / 2;
  total[0] = {1.0, 0.0};
  for (std::size_t k = 0; k < grid.n; ++k) {
    const std::size_t j = k >= mid ? k - mid : mid - k;
    out.g_values[k] = k >= mid ? total[j] : std::conj(total[j]);
    out.stderr_re[k] = std::sqrt(var_re[j]);
    out.stderr_im[k] = std::sqrt(var_im[j]);
  }
  const std::size_t per_batch = out.n_samples / n_batches;
  for (auto& bg : batch_g) {
    bg[0] = {1.0, 0.0};
    std::vector<std::complex<double>> full(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k) {
      const std::size_t j = k >= mid ? k - mid : mid - k;
      full[k] = k >= mid ? bg[j] : std::conj(bg[j]);
    }
    out.batches.push_back({per_batch, std::move(full)});
  }
  out.hbar = hbar;
  out.beta = beta;
  return out;
}

}  // namespace chaowork
