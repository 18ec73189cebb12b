#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "optbasis/error.hpp"

namespace optbasis {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
/// Column-major, so multi-RHS solves and QR run over contiguous columns.
using DenseMatrix = Eigen::MatrixXd;
using SparseOperator = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Worker cap for column-parallel work. Reads OPTBASIS_THREADS, falls back
/// to the hardware concurrency.
unsigned worker_count();

/// Reusable LU factorization of a square sparse operator. Solves with the
/// operator and with its transpose come from the same factorization.
/// Immutable once built; concurrent solves are allowed.
class FactorizedSolver {
public:
  explicit FactorizedSolver(const SparseOperator &op);

  Index size() const noexcept { return n_; }

  Vector solve(const Vector &b) const;
  Vector solve_transpose(const Vector &b) const;

  /// Column-wise solve of L X = B (or Lᵀ X = B). Columns may be split
  /// across worker threads; order is preserved.
  DenseMatrix solve_multi(const DenseMatrix &b, bool transpose = false) const;

  /// Smallest |pivot| seen on the diagonal of U.
  double min_abs_pivot() const noexcept { return min_pivot_; }

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  Index n_ = 0;
  double min_pivot_ = 0.0;
};

/// Throws SingularOperator when a pivot falls below 1e-14 * max|entry|.
inline FactorizedSolver factorize(const SparseOperator &op) {
  return FactorizedSolver(op);
}

inline DenseMatrix solve_multi(const FactorizedSolver &fs, const DenseMatrix &b,
                               bool transpose) {
  return fs.solve_multi(b, transpose);
}

struct ThinQr {
  DenseMatrix q;   ///< n_rows x rank, orthonormal columns
  Index rank = 0;  ///< numerically detected rank
  bool rank_deficient = false;
};

/// Orthonormal basis of span(A) via column-pivoted Householder QR. A rank
/// deficiency is reported in the result rather than thrown.
ThinQr qr_thin(const DenseMatrix &a);

struct DenseSvd {
  DenseMatrix u;
  Vector s;  ///< descending, nonnegative
  DenseMatrix v;
};

/// Thin SVD, A = U diag(s) Vᵀ.
DenseSvd svd_dense(const DenseMatrix &a);

double max_abs_entry(const SparseOperator &op);

} // namespace optbasis
