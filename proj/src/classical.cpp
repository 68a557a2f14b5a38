#include "chaowork/classical.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "chaowork/errors.hpp"
#include "phase_accumulator.hpp"

namespace chaowork {

ClassicalWorkSample sample_classical_work(const BilliardGeometry& geom, const QuenchPotential& pot,
                                          double beta, std::size_t n, std::uint64_t seed,
                                          int workers) {
  if (n < 1) throw Error(ErrorKind::RangeError, "sample size must be at least 1");
  if (!(beta > 0.0)) throw Error(ErrorKind::RangeError, "beta must be positive");
  ClassicalWorkSample sample;
  sample.beta = beta;
  sample.n = n;
  sample.seed = seed;
  sample.values.resize(n);
  const double strength = pot.strength();
  const auto count = static_cast<std::int64_t>(n);
  bool stalled = false;
#pragma omp parallel for schedule(static) num_threads(resolve_workers(workers))
  for (std::int64_t k = 0; k < count; ++k) {
    try {
      // The momentum is drawn to keep the stream aligned with the ensemble.
      const PhasePoint x = sample_phase_point(geom, beta, seed, static_cast<std::uint64_t>(k));
      sample.values[static_cast<std::size_t>(k)] = strength * eval(pot, x.q);
    } catch (const Error&) {
#pragma omp atomic write
      stalled = true;
    }
  }
  if (stalled) throw Error(ErrorKind::RejectionStall, "rejection sampler stalled");
  return sample;
}

CharacteristicGrid classical_characteristic(const ClassicalWorkSample& sample,
                                            const FourierGrid& grid, std::size_t batches,
                                            int workers) {
  const std::size_t half = grid.n / 2;
  auto sums = detail::accumulate_phases(
      sample.values.size(), half, batches, resolve_workers(workers),
      [&](std::size_t i, std::vector<double>& phases) {
        const double w = sample.values[i];
        for (std::size_t j = 0; j <= half; ++j) phases[j] = static_cast<double>(j) * grid.du * w;
      });
  CharacteristicGrid out = detail::assemble(grid, sums);
  out.beta = sample.beta;
  return out;
}

GaussRule gauss_legendre(std::size_t order) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (std::size_t i = 1; i < order; ++i) {
    const double k = static_cast<double>(i);
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(i, i - 1) = b;
    jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (std::size_t i = 0; i < order; ++i) {
    rule.nodes[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    const double v0 = solver.eigenvectors()(0, static_cast<Eigen::Index>(i));
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

namespace {

constexpr std::size_t kRuleOrder = 16;

// Integral of f over [a0,a1]x[b0,b1] with panels x panels Gauss panels, where
// the integrand receives (s, t) and returns f(s, t) * jacobian.
template <typename F>
double tensor_quadrature(const GaussRule& rule, double a0, double a1, double b0, double b1,
                         std::size_t panels, F&& f) {
  const double ha = (a1 - a0) / static_cast<double>(panels);
  const double hb = (b1 - b0) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t pa = 0; pa < panels; ++pa) {
    const double ca = a0 + (static_cast<double>(pa) + 0.5) * ha;
    for (std::size_t pb = 0; pb < panels; ++pb) {
      const double cb = b0 + (static_cast<double>(pb) + 0.5) * hb;
      double panel = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = ca + 0.5 * ha * rule.nodes[i];
        double inner = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          const double t = cb + 0.5 * hb * rule.nodes[k];
          inner += rule.weights[k] * f(s, t);
        }
        panel += rule.weights[i] * inner;
      }
      total += panel * 0.25 * ha * hb;
    }
  }
  return total;
}

// Integral of g(q) over the billiard.
template <typename G>
double domain_integral(const BilliardGeometry& geom, const GaussRule& rule, std::size_t panels,
                       G&& g) {
  double total = 0.0;
  if (geom.length > 0.0) {
    total += tensor_quadrature(rule, 0.0, geom.length, 0.0, geom.radius, panels,
                               [&](double x, double y) { return g(Vec2(x, y)); });
  }
  if (!geom.rectangle_only) {
    const Vec2 c = geom.arc_center();
    total += tensor_quadrature(rule, 0.0, geom.radius, 0.0, std::numbers::pi / 2.0, panels,
                               [&](double rho, double phi) {
                                 return rho * g(Vec2(c.x() + rho * std::cos(phi),
                                                     c.y() + rho * std::sin(phi)));
                               });
  }
  return total;
}

}  // namespace

double partition_ratio(const BilliardGeometry& geom, const QuenchPotential& pot, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::RangeError, "beta must be positive");
  const GaussRule rule = gauss_legendre(kRuleOrder);
  const double a = beta * pot.strength();
  auto ratio_at = [&](std::size_t panels) {
    const double boltzmann =
        domain_integral(geom, rule, panels, [&](const Vec2& q) { return std::exp(-a * eval(pot, q)); });
    const double measure = domain_integral(geom, rule, panels, [](const Vec2&) { return 1.0; });
    return boltzmann / measure;
  };
  double previous = ratio_at(2);
  for (std::size_t panels = 4; panels <= 256; panels *= 2) {
    const double current = ratio_at(panels);
    if (std::abs(current - previous) <= 1e-8 * std::abs(current)) return current;
    previous = current;
  }
  throw Error(ErrorKind::QuadratureNonConvergence, "partition ratio did not converge to 1e-8");
}

double classical_free_energy_difference(const BilliardGeometry& geom, const QuenchPotential& pot,
                                        double beta) {
  const double ratio = partition_ratio(geom, pot, beta);
  if (!(ratio > 0.0)) throw Error(ErrorKind::DegenerateMean, "partition ratio is not positive");
  return -std::log(ratio) / beta;
}

double density_of_states(const BilliardGeometry& geom, double energy) {
  if (!(energy > 0.0)) throw Error(ErrorKind::RangeError, "energy must be positive");
  return std::numbers::pi * area(geom);
}

namespace {

Vec2 gradient(const QuenchPotential& pot, const Vec2& q) {
  const double two_sigma2 = 2.0 * pot.sigma * pot.sigma;
  Vec2 grad = Vec2::Zero();
  for (std::size_t i = 0; i < pot.centers.size(); ++i) {
    const Vec2 d = q - pot.centers[i];
    grad += pot.signs[i] * std::exp(-d.squaredNorm() / two_sigma2) * (-2.0 / two_sigma2) * d;
  }
  return grad;
}

Vec2 project(const BilliardGeometry& geom, Vec2 q) {
  q.x() = std::clamp(q.x(), 0.0, geom.x_extent());
  q.y() = std::clamp(q.y(), 0.0, geom.y_extent());
  if (!geom.rectangle_only && q.x() > geom.length) {
    const Vec2 rel = q - geom.arc_center();
    if (rel.norm() > geom.radius) q = geom.arc_center() + rel * (geom.radius / rel.norm());
  }
  return q;
}

// Projected gradient ascent of sign * V with backtracking.
Vec2 refine(const BilliardGeometry& geom, const QuenchPotential& pot, Vec2 q, double sign) {
  double step = 0.1 * pot.sigma;
  double value = sign * eval(pot, q);
  for (int it = 0; it < 2000 && step > 1e-14; ++it) {
    const Vec2 g = sign * gradient(pot, q);
    const double gn = g.norm();
    if (gn == 0.0) break;
    const Vec2 trial = project(geom, q + step * g / gn);
    const double tv = sign * eval(pot, trial);
    if (tv > value) {
      q = trial;
      value = tv;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return q;
}

}  // namespace

WorkSupport work_support(const BilliardGeometry& geom, const QuenchPotential& pot) {
  const double h = pot.sigma / 20.0;
  const auto nx = static_cast<std::size_t>(std::ceil(geom.x_extent() / h));
  const auto ny = static_cast<std::size_t>(std::ceil(geom.y_extent() / h));
  struct Scan {
    double v;
    Vec2 q;
  };
  std::vector<Scan> scan;
  scan.reserve((nx + 1) * (ny + 1));
  for (std::size_t i = 0; i <= nx; ++i) {
    for (std::size_t j = 0; j <= ny; ++j) {
      const Vec2 q(geom.x_extent() * static_cast<double>(i) / static_cast<double>(nx),
                   geom.y_extent() * static_cast<double>(j) / static_cast<double>(ny));
      if (!contains_closed(geom, q, 1e-12)) continue;
      scan.push_back({eval(pot, q), q});
    }
  }
  auto by_value = [](const Scan& a, const Scan& b) { return a.v < b.v; };
  std::sort(scan.begin(), scan.end(), by_value);

  constexpr std::size_t kStarts = 8;
  WorkSupport out;
  double vmin = scan.front().v, vmax = scan.back().v;
  Vec2 qmin = scan.front().q, qmax = scan.back().q;
  for (std::size_t s = 0; s < std::min(kStarts, scan.size()); ++s) {
    const Vec2 lo = refine(geom, pot, scan[s].q, -1.0);
    if (eval(pot, lo) < vmin) { vmin = eval(pot, lo); qmin = lo; }
    const Vec2 hi = refine(geom, pot, scan[scan.size() - 1 - s].q, 1.0);
    if (eval(pot, hi) > vmax) { vmax = eval(pot, hi); qmax = hi; }
  }
  const double strength = pot.strength();
  out.min = std::min(strength * vmin, strength * vmax);
  out.max = std::max(strength * vmin, strength * vmax);
  out.argmin = strength >= 0.0 ? qmin : qmax;
  out.argmax = strength >= 0.0 ? qmax : qmin;
  return out;
}

std::vector<double> shell_final_energies(const BilliardGeometry& geom, const QuenchPotential& pot,
                                         double energy, std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  const double strength = pot.strength();
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    const PhasePoint x = sample_shell_point(geom, energy, rng);
    out[i] = x.p.squaredNorm() + strength * eval(pot, x.q);
  }
  return out;
}

}  // namespace chaowork
