#include "chaowork/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "chaowork/errors.hpp"

namespace chaowork {

namespace {

using cplx = std::complex<double>;

void check_layout(const CharacteristicGrid& g) {
  const FourierGrid& grid = g.grid;
  if (grid.n < 4 || grid.n % 2 != 0 || g.u_values.size() != grid.n || g.g_values.size() != grid.n)
    throw Error(ErrorKind::AsymmetricGrid, "characteristic grid is not an even symmetric u-grid");
  const double tol = 1e-12 * std::max(1.0, grid.u_max());
  for (std::size_t k = 0; k < grid.n; ++k) {
    if (std::abs(g.u_values[k] - grid.u(k)) > tol)
      throw Error(ErrorKind::AsymmetricGrid, "u_values do not match the uniform symmetric layout");
  }
}

// Symmetrized, damped and phase-shifted coefficients a_k; the Nyquist term is
// split evenly between +u_max and -u_max so that the result is real.
struct Coefficients {
  std::vector<cplx> a;
  cplx nyquist;
};

Coefficients coefficients(const FourierGrid& grid, const std::vector<cplx>& g, double broadening) {
  const std::size_t n = grid.n;
  Coefficients c;
  c.a.assign(n, {0.0, 0.0});
  const double scale = grid.du / (2.0 * std::numbers::pi);
  for (std::size_t k = 1; k < n; ++k) {
    const cplx sym = 0.5 * (g[k] + std::conj(g[n - k]));
    const double u = grid.u(k);
    const double damp = std::exp(-0.5 * broadening * broadening * u * u);
    c.a[k] = scale * damp * sym * std::polar(1.0, -u * grid.w_origin);
  }
  const double u_max = grid.u_max();
  const double damp = std::exp(-0.5 * broadening * broadening * u_max * u_max);
  // G(u_max) = conj(G(-u_max)) = conj(g[0]).
  c.nyquist = scale * damp * std::conj(g[0]) * std::polar(1.0, -u_max * grid.w_origin);
  return c;
}

// exp(-2 pi i m / n) for m = 0..n-1
std::vector<cplx> twiddles(std::size_t n) {
  std::vector<cplx> t(n);
  for (std::size_t m = 0; m < n; ++m)
    t[m] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  return t;
}

// P_j = sum_k a_k exp(-2 pi i (k - n/2) j / n) + Re(nyquist * exp(-i u_max dw j))
std::vector<cplx> transform(const FourierGrid& grid, const Coefficients& c,
                            const std::vector<cplx>& tw) {
  const std::size_t n = grid.n;
  const std::size_t mid = n / 2;
  std::vector<cplx> p(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx sum(0.0, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
      // (k - mid) j mod n, with k - mid possibly negative
      const std::size_t m = ((k + n - mid) % n) * j % n;
      sum += c.a[k] * tw[m];
    }
    // exp(-i u_max dw j) = (-1)^j
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    sum += cplx(sign * c.nyquist.real(), 0.0);
    p[j] = sum;
  }
  return p;
}

}  // namespace

double default_broadening(const FourierGrid& grid) { return 2.0 * grid.dw(); }

double WorkHistogram::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < density.size(); ++j) m += w[j] * density[j] * bin_width;
  return m;
}

bool WorkHistogram::nonnegative_within_noise() const {
  // truncating the damped G at u_max leaves ringing near 1e-9 of the peak
  double peak = 0.0;
  for (double d : density) peak = std::max(peak, d);
  for (std::size_t j = 0; j < density.size(); ++j)
    if (density[j] < -3.0 * error[j] - 1e-8 * peak) return false;
  return true;
}

WorkHistogram invert(const CharacteristicGrid& g, double broadening, const InvertOptions& options) {
  check_layout(g);
  if (!(broadening >= 0.0)) throw Error(ErrorKind::RangeError, "broadening must be >= 0");
  const FourierGrid& grid = g.grid;
  const std::size_t n = grid.n;

  if (options.check_aliasing) {
    const double u_max = grid.u_max();
    const double damp = std::exp(-0.5 * broadening * broadening * u_max * u_max);
    const double edge = damp * std::max(std::abs(g.g_values[0]), std::abs(g.g_values[1]));
    if (edge > options.aliasing_threshold) {
      std::ostringstream msg;
      msg << "|G| at u_max is " << edge << " after damping; widen the u-range or the broadening";
      throw Error(ErrorKind::AliasingSuspect, msg.str());
    }
  }

  WorkHistogram h;
  h.grid = grid;
  h.bin_width = grid.dw();
  h.broadening = broadening;
  h.w.resize(n);
  for (std::size_t j = 0; j < n; ++j) h.w[j] = grid.w(j);
  h.w_min = h.w.front();
  h.w_max = h.w.back();

  const auto tw = twiddles(n);
  const auto raw = transform(grid, coefficients(grid, g.g_values, broadening), tw);
  h.density.resize(n);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    h.density[j] = raw[j].real();
    max_re = std::max(max_re, std::abs(raw[j].real()));
    max_im = std::max(max_im, std::abs(raw[j].imag()));
  }
  h.imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;
  h.total_mass = 0.0;
  for (double d : h.density) h.total_mass += d * h.bin_width;

  h.error.assign(n, 0.0);
  if (g.batches.size() >= 2) {
    double total_count = 0.0;
    for (const auto& b : g.batches) {
      const auto braw = transform(grid, coefficients(grid, b.g, broadening), tw);
      std::vector<double> bd(n);
      for (std::size_t j = 0; j < n; ++j) bd[j] = braw[j].real();
      h.batch_density.push_back(std::move(bd));
      h.batch_counts.push_back(static_cast<double>(b.count));
      total_count += static_cast<double>(b.count);
    }
    // Weighted batch-means variance of the overall mean.
    const double nb = static_cast<double>(g.batches.size());
    for (std::size_t j = 0; j < n; ++j) {
      double var = 0.0;
      for (std::size_t b = 0; b < h.batch_density.size(); ++b) {
        const double frac = h.batch_counts[b] / total_count;
        const double d = h.batch_density[b][j] - h.density[j];
        var += frac * frac * d * d;
      }
      h.error[j] = std::sqrt(var * nb / (nb - 1.0));
    }
  } else {
    // Independent-point propagation of the per-u standard errors.
    const double scale = grid.du / (2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < n; ++j) {
      double var = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double u = grid.u(k);
        if (u == 0.0) continue;
        const double damp = std::exp(-0.5 * broadening * broadening * u * u);
        const double phase = u * h.w[j];
        const double cr = std::cos(phase) * g.stderr_re[k];
        const double ci = std::sin(phase) * g.stderr_im[k];
        var += scale * scale * damp * damp * (cr * cr + ci * ci);
      }
      h.error[j] = std::sqrt(var);
    }
  }
  return h;
}

std::vector<std::complex<double>> forward_transform(const WorkHistogram& hist) {
  const FourierGrid& grid = hist.grid;
  std::vector<cplx> g(grid.n);
  for (std::size_t k = 0; k < grid.n; ++k) {
    const double u = grid.u(k);
    cplx sum(0.0, 0.0);
    for (std::size_t j = 0; j < grid.n; ++j)
      sum += hist.density[j] * hist.bin_width * std::polar(1.0, u * hist.w[j]);
    g[k] = sum;
  }
  return g;
}

}  // namespace chaowork
