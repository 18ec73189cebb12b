#include "optbasis/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/SparseLU>

namespace optbasis {

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("OPTBASIS_THREADS")) {
    char *end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0)
      return std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

namespace {

// SparseLU keeps the diagonal of U inside its supernodal L storage; the
// subclass exposes it so near-singular pivots can be rejected.
class PivotAwareLU
    : public Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>> {
public:
  double min_abs_pivot() const {
    double smallest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < m_Lstore.cols(); ++j) {
      double pivot = 0.0;
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it) {
        if (it.index() == j) {
          pivot = std::abs(it.value());
          break;
        }
      }
      smallest = std::min(smallest, pivot);
    }
    return smallest;
  }
};

template <typename Fn>
void for_column_chunks(Index ncols, Fn &&fn) {
  const Index workers =
      std::min<Index>(static_cast<Index>(worker_count()), ncols);
  if (workers <= 1) {
    fn(0, ncols);
    return;
  }
  std::vector<std::thread> pool;
  const Index chunk = (ncols + workers - 1) / workers;
  for (Index begin = 0; begin < ncols; begin += chunk) {
    const Index count = std::min(chunk, ncols - begin);
    pool.emplace_back([&fn, begin, count] { fn(begin, count); });
  }
  for (auto &t : pool)
    t.join();
}

} // namespace

struct FactorizedSolver::Impl {
  mutable PivotAwareLU lu;
};

FactorizedSolver::FactorizedSolver(const SparseOperator &op) {
  if (op.rows() != op.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "factorize expects a square operator, got " +
                    std::to_string(op.rows()) + "x" + std::to_string(op.cols()));
  n_ = op.rows();
  impl_ = std::make_shared<Impl>();
  SparseOperator a = op;
  a.makeCompressed();
  impl_->lu.analyzePattern(a);
  impl_->lu.factorize(a);
  if (impl_->lu.info() != Eigen::Success)
    throw Error(ErrorKind::SingularOperator,
                "LU factorization failed: " + impl_->lu.lastErrorMessage());
  min_pivot_ = n_ == 0 ? 0.0 : impl_->lu.min_abs_pivot();
  const double scale = max_abs_entry(a);
  if (n_ > 0 && !(min_pivot_ > 1e-14 * scale))
    throw Error(ErrorKind::SingularOperator,
                "pivot " + std::to_string(min_pivot_) +
                    " below 1e-14 * max|entry|");
}

Vector FactorizedSolver::solve(const Vector &b) const {
  if (b.size() != n_)
    throw Error(ErrorKind::DimensionMismatch, "solve: rhs size mismatch");
  return impl_->lu.solve(b);
}

Vector FactorizedSolver::solve_transpose(const Vector &b) const {
  if (b.size() != n_)
    throw Error(ErrorKind::DimensionMismatch, "solve_transpose: rhs size mismatch");
  return impl_->lu.transpose().solve(b);
}

DenseMatrix FactorizedSolver::solve_multi(const DenseMatrix &b,
                                          bool transpose) const {
  if (b.rows() != n_)
    throw Error(ErrorKind::DimensionMismatch,
                "solve_multi: B has " + std::to_string(b.rows()) +
                    " rows, operator has " + std::to_string(n_));
  DenseMatrix x(b.rows(), b.cols());
  for_column_chunks(b.cols(), [&](Index begin, Index count) {
    if (transpose)
      x.middleCols(begin, count) =
          impl_->lu.transpose().solve(b.middleCols(begin, count));
    else
      x.middleCols(begin, count) = impl_->lu.solve(b.middleCols(begin, count));
  });
  return x;
}

ThinQr qr_thin(const DenseMatrix &a) {
  if (a.rows() < a.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "qr_thin expects n_rows >= n_cols");
  ThinQr out;
  if (a.cols() == 0) {
    out.q = DenseMatrix(a.rows(), 0);
    return out;
  }
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(a);
  qr.setThreshold(1e-13);
  out.rank = qr.rank();
  out.rank_deficient = out.rank < a.cols();
  out.q = qr.householderQ() * DenseMatrix::Identity(a.rows(), out.rank);
  return out;
}

DenseSvd svd_dense(const DenseMatrix &a) {
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw Error(ErrorKind::SvdFailure, "dense SVD did not converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double max_abs_entry(const SparseOperator &op) {
  double m = 0.0;
  for (Index k = 0; k < op.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(op, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

} // namespace optbasis
