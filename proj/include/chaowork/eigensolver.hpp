#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>

namespace chaowork {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

struct EigensolveOptions {
  /// Matrices up to this dimension are diagonalized densely.
  Eigen::Index dense_limit = 2000;
  /// Required residual ||H v - lambda v|| relative to ||H||_inf.
  double residual_tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
  /// Count eigenvalues below the cut with an LDL^T factorization (Sylvester
  /// inertia) and fail if Lanczos missed any.
  bool verify_inertia = true;
};

/// Lowest n_states eigenpairs of a symmetric sparse matrix. Large matrices use
/// shift-invert Lanczos with full reorthogonalization; Ritz pairs are accepted
/// only after explicit residual checks.
EigenPairs eigensolve(const SparseMatrix& matrix, std::size_t n_states,
                      const EigensolveOptions& options = {});

/// Largest absolute row sum.
double infinity_norm(const SparseMatrix& matrix);

/// Number of eigenvalues strictly below `shift` (inertia of matrix - shift I).
/// Returns -1 if the factorization fails.
Eigen::Index count_below(const SparseMatrix& matrix, double shift);

}  // namespace chaowork
