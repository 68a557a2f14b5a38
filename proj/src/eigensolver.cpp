#include "chaowork/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaowork/errors.hpp"
#include "chaowork/rng.hpp"

namespace chaowork {

double infinity_norm(const SparseMatrix& matrix) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(matrix.rows());
  for (Eigen::Index c = 0; c < matrix.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(matrix, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

Eigen::Index count_below(const SparseMatrix& matrix, double shift) {
  SparseMatrix shifted = matrix;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) return -1;
  const Eigen::VectorXd d = ldlt.vectorD();
  if (!d.allFinite()) return -1;
  return static_cast<Eigen::Index>((d.array() < 0.0).count());
}

namespace {

// Lower Gershgorin bound of the spectrum.
double gershgorin_lower(const SparseMatrix& matrix) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(matrix.rows());
  Eigen::VectorXd off = Eigen::VectorXd::Zero(matrix.rows());
  for (Eigen::Index c = 0; c < matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(matrix, c); it; ++it) {
      if (it.row() == it.col()) diag(it.row()) = it.value();
      else off(it.row()) += std::abs(it.value());
    }
  }
  return (diag - off).minCoeff();
}

EigenPairs dense_solve(const SparseMatrix& matrix, Eigen::Index m) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "dense eigensolver failed");
  return {solver.eigenvalues().head(m), solver.eigenvectors().leftCols(m)};
}

Eigen::VectorXd random_unit(Eigen::Index n, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
  return v.normalized();
}

}  // namespace

EigenPairs eigensolve(const SparseMatrix& matrix, std::size_t n_states,
                      const EigensolveOptions& options) {
  const Eigen::Index n = matrix.rows();
  const auto m = static_cast<Eigen::Index>(n_states);
  if (matrix.cols() != n) throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
  if (m < 1 || m > n) throw Error(ErrorKind::RangeError, "n_states must be in [1, dimension]");
  if (n <= options.dense_limit || 4 * m >= n) return dense_solve(matrix, m);

  const double norm = infinity_norm(matrix);
  const double sigma = gershgorin_lower(matrix) - 1e-3 * norm;
  SparseMatrix shifted = matrix;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLLT<SparseMatrix> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "shifted matrix is not positive definite");

  // Lanczos on (H - sigma)^-1, whose largest eigenvalues are the lowest of H.
  Eigen::Index capacity = std::min(n, std::max<Eigen::Index>(2 * m + 40, m + 100));
  Eigen::MatrixXd basis(n, capacity);
  std::vector<double> alpha, beta;
  basis.col(0) = random_unit(n, options.seed, 0);
  Eigen::Index steps = 0;
  Eigen::Index next_check = std::min(n, m + m / 2 + 20);
  std::uint64_t restarts = 0;

  for (;;) {
    Eigen::VectorXd w = llt.solve(basis.col(steps));
    const double a = basis.col(steps).dot(w);
    alpha.push_back(a);
    w -= a * basis.col(steps);
    if (steps > 0) w -= beta.back() * basis.col(steps - 1);
    for (int pass = 0; pass < 2; ++pass) {
      const auto q = basis.leftCols(steps + 1);
      w.noalias() -= q * (q.transpose() * w);
    }
    ++steps;

    if (steps == next_check || steps == n) {
      const Eigen::Index k = steps;
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
      Eigen::VectorXd sub = Eigen::VectorXd::Zero(std::max<Eigen::Index>(k - 1, 0));
      for (Eigen::Index i = 0; i + 1 < k; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const double tail = w.norm();
      bool estimates_ok = k >= m;
      for (Eigen::Index i = 0; estimates_ok && i < m; ++i) {
        const Eigen::Index col = k - 1 - i;
        const double theta = tri.eigenvalues()(col);
        estimates_ok = std::abs(tail * tri.eigenvectors()(k - 1, col)) <= 1e-11 * theta;
      }
      if (estimates_ok || k == n) {
        EigenPairs out;
        out.values.resize(m);
        Eigen::MatrixXd ritz(k, m);
        for (Eigen::Index i = 0; i < m; ++i) {
          const Eigen::Index col = k - 1 - i;
          out.values(i) = sigma + 1.0 / tri.eigenvalues()(col);
          ritz.col(i) = tri.eigenvectors().col(col);
        }
        out.vectors.noalias() = basis.leftCols(k) * ritz;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
          const Eigen::VectorXd r = matrix * out.vectors.col(i) - out.values(i) * out.vectors.col(i);
          worst = std::max(worst, r.norm());
        }
        if (worst <= options.residual_tolerance * norm) {
          if (options.verify_inertia) {
            const double gap_top =
                k > m ? sigma + 1.0 / tri.eigenvalues()(k - 1 - m) : out.values(m - 1) + 1.0;
            const double cut = 0.5 * (out.values(m - 1) + gap_top);
            const Eigen::Index below = count_below(matrix, cut);
            if (below >= 0 && below != m) {
              std::ostringstream msg;
              msg << "Lanczos returned " << m << " eigenvalues below " << cut << " but the inertia is "
                  << below;
              throw Error(ErrorKind::ConvergenceFailure, msg.str());
            }
          }
          return out;
        }
        if (k == n) throw Error(ErrorKind::ConvergenceFailure, "Lanczos residuals above tolerance");
      }
      next_check = std::min(n, steps + std::max<Eigen::Index>(m / 4, 20));
    }

    double b = w.norm();
    if (b < 1e-12) {
      // Invariant subspace: continue with a fresh vector orthogonal to the basis.
      w = random_unit(n, options.seed, ++restarts);
      for (int pass = 0; pass < 2; ++pass) {
        const auto q = basis.leftCols(steps);
        w.noalias() -= q * (q.transpose() * w);
      }
      b = 0.0;
      w.normalize();
    } else {
      w /= b;
    }
    beta.push_back(b);
    if (steps == capacity) {
      capacity = std::min(n, capacity + std::max<Eigen::Index>(capacity / 2, 50));
      basis.conservativeResize(Eigen::NoChange, capacity);
    }
    basis.col(steps) = w;
  }
}

}  // namespace chaowork
