#include "chaowork/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "chaowork/errors.hpp"

namespace chaowork {

namespace {

bool interior_site(const BilliardGeometry& geom, const Vec2& q, double margin) {
  const double x = q.x(), y = q.y();
  if (!(x > margin) || !(y > margin) || !(y < geom.radius - margin)) return false;
  if (geom.rectangle_only) return x < geom.length - margin;
  if (x <= geom.length) return true;
  return std::hypot(x - geom.length, y) < geom.radius - margin;
}

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::RangeError, "beta must be positive");
}

// exp(-beta (E0_m - E0_0)) for the retained initial states.
Eigen::VectorXd boltzmann(const QuenchSpectra& spectra, double beta) {
  return (-beta * (spectra.e0.array() - spectra.e0(0))).exp().matrix();
}

struct Spike {
  double work;
  double weight;
};

std::vector<Spike> spikes(const QuenchSpectra& spectra, double beta) {
  const Eigen::VectorXd w = boltzmann(spectra, beta);
  std::vector<Spike> out;
  out.reserve(spectra.n_states * spectra.n_states);
  double total = 0.0;
  for (std::size_t m = 0; m < spectra.n_states; ++m) {
    const auto mi = static_cast<Eigen::Index>(m);
    for (std::size_t n = 0; n < spectra.n_states; ++n) {
      const auto ni = static_cast<Eigen::Index>(n);
      const double weight = w(mi) * spectra.transition(mi, ni);
      total += weight;
      out.push_back({spectra.ef(ni) - spectra.e0(mi), weight});
    }
  }
  for (Spike& s : out) s.weight /= total;
  return out;
}

}  // namespace

GridSpec make_grid(const BilliardGeometry& geom, double h) {
  validate(geom);
  if (!(h > 0.0)) throw Error(ErrorKind::RangeError, "grid spacing must be positive");
  GridSpec grid;
  grid.h = h;
  const int nx = static_cast<int>(std::ceil(geom.x_extent() / h));
  const int ny = static_cast<int>(std::ceil(geom.y_extent() / h));
  const double margin = 1e-9 * h;
  for (int j = 1; j < ny + 1; ++j)
    for (int i = 1; i < nx + 1; ++i)
      if (interior_site(geom, Vec2(i * h, j * h), margin)) grid.sites.push_back({i, j});
  if (grid.sites.size() < 100) {
    std::ostringstream msg;
    msg << "grid spacing " << h << " leaves only " << grid.sites.size() << " interior sites";
    throw Error(ErrorKind::GridTooCoarse, msg.str());
  }
  return grid;
}

QuenchHamiltonians build_hamiltonians(const BilliardGeometry& geom, const QuenchPotential& pot,
                                      double hbar, double h) {
  validate(pot);
  if (!(hbar > 0.0)) throw Error(ErrorKind::RangeError, "hbar must be positive");
  QuenchHamiltonians ham;
  ham.grid = make_grid(geom, h);
  ham.hbar = hbar;
  ham.strength = pot.strength();
  const auto n = static_cast<Eigen::Index>(ham.grid.size());

  int max_i = 0, max_j = 0;
  for (const auto& s : ham.grid.sites) {
    max_i = std::max(max_i, s[0]);
    max_j = std::max(max_j, s[1]);
  }
  const int stride = max_i + 2;
  std::vector<Eigen::Index> lookup(static_cast<std::size_t>(stride * (max_j + 2)), -1);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& site = ham.grid.sites[static_cast<std::size_t>(s)];
    lookup[static_cast<std::size_t>(site[1] * stride + site[0])] = s;
  }

  const double kinetic = hbar * hbar / (h * h);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * n));
  constexpr std::array<std::array<int, 2>, 4> kNeighbours{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto& site = ham.grid.sites[static_cast<std::size_t>(s)];
    triplets.emplace_back(s, s, 4.0 * kinetic);
    for (const auto& d : kNeighbours) {
      const int i = site[0] + d[0], j = site[1] + d[1];
      if (i < 0 || j < 0 || i >= stride || j > max_j + 1) continue;
      const Eigen::Index t = lookup[static_cast<std::size_t>(j * stride + i)];
      if (t >= 0) triplets.emplace_back(s, t, -kinetic);
    }
  }
  ham.h0.resize(n, n);
  ham.h0.setFromTriplets(triplets.begin(), triplets.end());
  ham.h0.makeCompressed();

  ham.potential.resize(n);
  for (Eigen::Index s = 0; s < n; ++s)
    ham.potential(s) = eval(pot, ham.grid.position(static_cast<std::size_t>(s)));
  ham.hf = ham.h0;
  for (Eigen::Index s = 0; s < n; ++s) ham.hf.coeffRef(s, s) += ham.strength * ham.potential(s);
  return ham;
}

Eigen::MatrixXd transition_matrix(const EigenPairs& initial, const EigenPairs& final) {
  if (initial.vectors.rows() != final.vectors.rows())
    throw Error(ErrorKind::DimensionMismatch, "eigenvectors live on different grids");
  const Eigen::MatrixXd overlap = initial.vectors.transpose() * final.vectors;
  return overlap.array().square().matrix();
}

QuenchSpectra solve_quench(const QuenchHamiltonians& ham, std::size_t n_states,
                           std::size_t n_basis, const EigensolveOptions& options) {
  if (n_states < 1 || n_states > n_basis)
    throw Error(ErrorKind::RangeError, "need 1 <= n_states <= n_basis");
  if (n_basis > ham.grid.size())
    throw Error(ErrorKind::RangeError, "basis larger than the grid");
  const EigenPairs initial = eigensolve(ham.h0, n_basis, options);
  const auto nb = static_cast<Eigen::Index>(n_basis);
  const auto ns = static_cast<Eigen::Index>(n_states);

  Eigen::MatrixXd projected = initial.vectors.transpose() * (ham.potential.asDiagonal() * initial.vectors);
  projected = 0.5 * (projected + projected.transpose()).eval();
  Eigen::MatrixXd hb = ham.strength * projected;
  hb.diagonal() += initial.values;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hb);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "projected Hamiltonian diagonalization failed");

  QuenchSpectra out;
  out.e0 = initial.values.head(ns);
  out.ef = solver.eigenvalues().head(ns);
  out.transition = solver.eigenvectors().topLeftCorner(ns, ns).array().square().matrix();
  out.n_states = n_states;
  out.n_basis = static_cast<std::size_t>(nb);
  out.n_sites = ham.grid.size();
  out.hbar = ham.hbar;
  out.h = ham.grid.h;
  return out;
}

double weyl_level_spacing(const BilliardGeometry& geom, double hbar) {
  return 4.0 * std::numbers::pi * hbar * hbar / area(geom);
}

double weyl_count(const BilliardGeometry& geom, double hbar, double energy) {
  if (energy <= 0.0) return 0.0;
  const double n = (area(geom) * energy - perimeter(geom) * hbar * std::sqrt(energy)) /
                   (4.0 * std::numbers::pi * hbar * hbar);
  return std::max(0.0, n);
}

double weyl_energy(const BilliardGeometry& geom, double hbar, double count) {
  const double a = area(geom), l = perimeter(geom);
  const double root = (l * hbar + std::sqrt(l * l * hbar * hbar +
                                            16.0 * std::numbers::pi * a * hbar * hbar * count)) /
                      (2.0 * a);
  return root * root;
}

QuantumPlan plan_quantum(const BilliardGeometry& geom, double hbar, double beta_min,
                         double work_max, const QuantumPlanOptions& options) {
  check_beta(beta_min);
  QuantumPlan plan;
  plan.keep_energy = std::max(options.boltzmann_cut / beta_min,
                              options.initial_reach / beta_min + std::max(work_max, 0.0));
  plan.n_states = static_cast<std::size_t>(std::ceil(weyl_count(geom, hbar, plan.keep_energy)));
  plan.n_states = std::max<std::size_t>(plan.n_states, 1);
  plan.n_basis = static_cast<std::size_t>(std::ceil(options.basis_ratio * static_cast<double>(plan.n_states)));
  plan.n_basis = std::max(plan.n_basis, options.min_basis);
  if (plan.n_basis > options.max_basis) {
    plan.capped = true;
    plan.n_basis = options.max_basis;
    plan.n_states = std::min(plan.n_states, static_cast<std::size_t>(
                                                std::floor(static_cast<double>(options.max_basis) /
                                                           options.basis_ratio)));
  }
  plan.n_states = std::min(plan.n_states, plan.n_basis);
  plan.basis_energy = weyl_energy(geom, hbar, static_cast<double>(plan.n_basis));
  const double wavelength = 2.0 * std::numbers::pi * hbar / std::sqrt(plan.basis_energy);
  plan.h = wavelength / options.points_per_wavelength;
  return plan;
}

double top_decile_weight(const QuenchSpectra& spectra, double beta) {
  check_beta(beta);
  const Eigen::VectorXd w = boltzmann(spectra, beta);
  const auto n = static_cast<Eigen::Index>(spectra.n_states);
  const Eigen::Index top = n - std::max<Eigen::Index>(1, n / 10);
  return w.tail(n - top).sum() / w.sum();
}

void check_truncation(const QuenchSpectra& spectra, double beta) {
  const double weight = top_decile_weight(spectra, beta);
  if (weight > 0.01) {
    std::ostringstream msg;
    msg << "top decile of the " << spectra.n_states << " retained states carries Boltzmann weight "
        << weight << " at beta=" << beta;
    throw Error(ErrorKind::TruncationDominates, msg.str());
  }
}

double truncation_loss(const QuenchSpectra& spectra, double beta) {
  const Eigen::VectorXd w = boltzmann(spectra, beta);
  const Eigen::VectorXd rows = spectra.transition.rowwise().sum();
  return 1.0 - w.dot(rows) / w.sum();
}

WorkHistogram quantum_work_distribution(const QuenchSpectra& spectra, double beta,
                                        const FourierGrid& grid, double broadening) {
  check_beta(beta);
  if (!(broadening >= 0.0)) throw Error(ErrorKind::RangeError, "broadening must be >= 0");
  WorkHistogram h;
  h.grid = grid;
  h.bin_width = grid.dw();
  h.broadening = broadening;
  const std::size_t n = grid.n;
  h.w.resize(n);
  for (std::size_t j = 0; j < n; ++j) h.w[j] = grid.w(j);
  h.w_min = h.w.front();
  h.w_max = h.w.back();
  h.density.assign(n, 0.0);
  h.error.assign(n, 0.0);

  const double span = grid.w_span();
  const double dw = h.bin_width;
  const auto wrap = [n](long long j) {
    const long long nn = static_cast<long long>(n);
    return static_cast<std::size_t>(((j % nn) + nn) % nn);
  };
  for (const Spike& s : spikes(spectra, beta)) {
    if (s.weight <= 0.0) continue;
    // Position inside the periodic window.
    const double x = s.work - grid.w_origin - span * std::floor((s.work - grid.w_origin) / span);
    if (broadening == 0.0) {
      h.density[wrap(std::llround(x / dw))] += s.weight / dw;
      continue;
    }
    const double reach = 10.0 * broadening;
    const auto lo = static_cast<long long>(std::floor((x - reach) / dw));
    const auto hi = static_cast<long long>(std::ceil((x + reach) / dw));
    const double norm = s.weight / (std::sqrt(2.0 * std::numbers::pi) * broadening);
    for (long long j = lo; j <= hi; ++j) {
      const double d = (static_cast<double>(j) * dw - x) / broadening;
      h.density[wrap(j)] += norm * std::exp(-0.5 * d * d);
    }
  }
  h.total_mass = 0.0;
  for (double d : h.density) h.total_mass += d * dw;
  return h;
}

CharacteristicGrid quantum_characteristic(const QuenchSpectra& spectra, double beta,
                                          const FourierGrid& grid) {
  check_beta(beta);
  CharacteristicGrid g = make_characteristic(grid);
  const auto list = spikes(spectra, beta);
  const std::size_t mid = grid.n / 2;
  std::vector<std::complex<double>> half(mid + 1);
  for (std::size_t j = 0; j <= mid; ++j) {
    const double u = static_cast<double>(j) * grid.du;
    std::complex<double> sum(0.0, 0.0);
    for (const Spike& s : list) sum += s.weight * std::polar(1.0, u * s.work);
    half[j] = sum;
  }
  half[0] = {1.0, 0.0};  // weights are normalised; drop the rounding residue
  for (std::size_t k = 0; k < grid.n; ++k)
    g.g_values[k] = k >= mid ? half[k - mid] : std::conj(half[mid - k]);
  g.beta = beta;
  g.n_samples = spectra.n_states;
  return g;
}

JarzynskiIdentity quantum_jarzynski(const QuenchSpectra& spectra, double beta) {
  check_beta(beta);
  const double ref = std::min(spectra.e0(0), spectra.ef(0));
  const Eigen::ArrayXd z0 = (-beta * (spectra.e0.array() - ref)).exp();
  const Eigen::ArrayXd zf = (-beta * (spectra.ef.array() - ref)).exp();
  const Eigen::VectorXd columns = spectra.transition.colwise().sum().transpose();
  JarzynskiIdentity out;
  out.lhs = (columns.array() * zf).sum() / z0.sum();
  out.rhs = zf.sum() / z0.sum();
  return out;
}

namespace {

constexpr char kMagic[8] = {'C', 'H', 'W', 'K', 'S', 'P', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}
void put_u32(std::ostream& os, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes, 4);
}
void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8))
    throw Error(ErrorKind::IoError, "truncated spectra file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char bytes[4];
  if (!is.read(reinterpret_cast<char*>(bytes), 4))
    throw Error(ErrorKind::IoError, "truncated spectra file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void save_spectra(const QuenchSpectra& spectra, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  os.write(kMagic, sizeof kMagic);
  put_u32(os, kVersion);
  put_u32(os, 0);
  put_f64(os, spectra.hbar);
  put_f64(os, spectra.h);
  put_u64(os, spectra.n_sites);
  put_u64(os, spectra.n_basis);
  put_u64(os, spectra.n_states);
  const auto n = static_cast<Eigen::Index>(spectra.n_states);
  for (Eigen::Index i = 0; i < n; ++i) put_f64(os, spectra.e0(i));
  for (Eigen::Index i = 0; i < n; ++i) put_f64(os, spectra.ef(i));
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k) put_f64(os, spectra.transition(m, k));
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

QuenchSpectra load_spectra(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw Error(ErrorKind::IoError, path.string() + " is not a spectra file");
  if (get_u32(is) != kVersion) throw Error(ErrorKind::IoError, "unsupported spectra version");
  get_u32(is);
  QuenchSpectra s;
  s.hbar = get_f64(is);
  s.h = get_f64(is);
  s.n_sites = get_u64(is);
  s.n_basis = get_u64(is);
  s.n_states = get_u64(is);
  const auto n = static_cast<Eigen::Index>(s.n_states);
  s.e0.resize(n);
  s.ef.resize(n);
  s.transition.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) s.e0(i) = get_f64(is);
  for (Eigen::Index i = 0; i < n; ++i) s.ef(i) = get_f64(is);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k) s.transition(m, k) = get_f64(is);
  return s;
}

}  // namespace chaowork
