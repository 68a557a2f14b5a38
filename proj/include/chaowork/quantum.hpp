#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "chaowork/characteristic.hpp"
#include "chaowork/eigensolver.hpp"
#include "chaowork/potential.hpp"
#include "chaowork/spectra.hpp"

namespace chaowork {

/// Lattice sites (i h, j h) strictly inside the billiard. Neighbours outside
/// the domain are Dirichlet zeros.
struct GridSpec {
  double h = 0.0;
  std::vector<std::array<int, 2>> sites;

  Vec2 position(std::size_t s) const { return {h * sites[s][0], h * sites[s][1]}; }
  std::size_t size() const { return sites.size(); }
};

/// Throws GridTooCoarse when fewer than 100 interior sites exist.
GridSpec make_grid(const BilliardGeometry& geom, double h);

struct QuenchHamiltonians {
  GridSpec grid;
  SparseMatrix h0;
  SparseMatrix hf;
  Eigen::VectorXd potential;  // V at the sites
  double hbar = 1.0;
  double strength = 0.0;      // xi_f - xi_0
};

/// H0 = -hbar^2 Laplacian (five-point stencil, mass 1/2) and Hf = H0 + (xi_f - xi_0) diag(V).
QuenchHamiltonians build_hamiltonians(const BilliardGeometry& geom, const QuenchPotential& pot,
                                      double hbar, double h);

/// Quench spectra: initial energies e0, final energies ef and transition(m, n) = P(n|m).
struct QuenchSpectra {
  Eigen::VectorXd e0;
  Eigen::VectorXd ef;
  Eigen::MatrixXd transition;
  std::size_t n_states = 0;
  std::size_t n_basis = 0;
  std::size_t n_sites = 0;
  double hbar = 1.0;
  double h = 0.0;
};

/// transition(m, n) = (v0_m . vf_n)^2 for eigenvectors on the same grid.
Eigen::MatrixXd transition_matrix(const EigenPairs& initial, const EigenPairs& final);

/// Diagonalizes H0 for the lowest n_basis states, then Hf in that eigenbasis
/// (diag(E0) + (xi_f - xi_0) Phi^T V Phi), and keeps the lowest n_states of each.
/// n_basis equal to the grid size gives the exact grid spectrum.
QuenchSpectra solve_quench(const QuenchHamiltonians& ham, std::size_t n_states,
                           std::size_t n_basis, const EigensolveOptions& options = {});

/// Mean level spacing 4 pi hbar^2 / A (Weyl, mass 1/2).
double weyl_level_spacing(const BilliardGeometry& geom, double hbar);
/// Weyl count with the Dirichlet perimeter term: (A E - L hbar sqrt(E)) / (4 pi hbar^2).
double weyl_count(const BilliardGeometry& geom, double hbar, double energy);
/// Inverse of weyl_count.
double weyl_energy(const BilliardGeometry& geom, double hbar, double count);

struct QuantumPlanOptions {
  std::size_t min_basis = 0;
  std::size_t max_basis = 1200;
  double basis_ratio = 2.2;
  double points_per_wavelength = 10.0;
  /// Retained states reach beta E = boltzmann_cut ...
  double boltzmann_cut = 6.9;
  /// ... and initial energies up to initial_reach / beta plus the largest work.
  double initial_reach = 5.0;
};

struct QuantumPlan {
  std::size_t n_states = 0;
  std::size_t n_basis = 0;
  double h = 0.0;
  double keep_energy = 0.0;
  double basis_energy = 0.0;
  bool capped = false;
};

/// State-count planner from Weyl's law for the hottest temperature (smallest beta).
QuantumPlan plan_quantum(const BilliardGeometry& geom, double hbar, double beta_min,
                         double work_max, const QuantumPlanOptions& options = {});

/// Boltzmann weight of the top decile of retained initial states.
double top_decile_weight(const QuenchSpectra& spectra, double beta);

/// Throws TruncationDominates when top_decile_weight exceeds 1%.
void check_truncation(const QuenchSpectra& spectra, double beta);

/// Two-point-measurement P^Q(W) on the grid's W bins: every spike
/// (W = Ef_n - E0_m, weight e^{-beta E0_m} P(n|m) / Z) becomes a Gaussian of
/// width `broadening`, wrapped onto the periodic window (nearest bin when the
/// broadening is zero). Weights are renormalized over the retained block.
WorkHistogram quantum_work_distribution(const QuenchSpectra& spectra, double beta,
                                        const FourierGrid& grid, double broadening);

/// G^Q(u) = sum_{m,n} w_m P(n|m) exp(i u (Ef_n - E0_m)) with the same
/// normalized weights as quantum_work_distribution.
CharacteristicGrid quantum_characteristic(const QuenchSpectra& spectra, double beta,
                                          const FourierGrid& grid);

/// Share of the Boltzmann-weighted transition mass lost to basis truncation.
double truncation_loss(const QuenchSpectra& spectra, double beta);

struct JarzynskiIdentity {
  double lhs = 0.0;  // <exp(-beta W)>
  double rhs = 0.0;  // Z_f / Z_0
};

JarzynskiIdentity quantum_jarzynski(const QuenchSpectra& spectra, double beta);

/// Binary container: see README ("Spectra file format").
void save_spectra(const QuenchSpectra& spectra, const std::filesystem::path& path);
QuenchSpectra load_spectra(const std::filesystem::path& path);

}  // namespace chaowork
