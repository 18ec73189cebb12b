#include "optbasis/sobolev.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/KroneckerProduct>

namespace optbasis {

DiffOp1D fd_operator_1d(Index m_intervals, Index k, double h) {
  const Index n = m_intervals - 1;
  if (k < 0 || k >= n)
    throw Error(ErrorKind::OrderTooHigh,
                "difference order " + std::to_string(k) +
                    " needs more than " + std::to_string(m_intervals) +
                    " intervals");
  SparseOperator d(n, n);
  d.setIdentity();
  for (Index level = 1; level <= k; ++level) {
    const Index rows = n - level;
    std::vector<Triplet> t;
    t.reserve(2 * rows);
    for (Index i = 0; i < rows; ++i) {
      t.emplace_back(i, i, -1.0 / h);
      t.emplace_back(i, i + 1, 1.0 / h);
    }
    SparseOperator step(rows, rows + 1);
    step.setFromTriplets(t.begin(), t.end());
    d = (step * d).pruned();
  }
  d.makeCompressed();
  return {k, h, d};
}

SparseOperator fd_operator_2d(const DiffOp1D &dx, const DiffOp1D &dy) {
  if (dx.matrix.cols() != dy.matrix.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "2D difference needs factors on the same grid");
  SparseOperator out = Eigen::kroneckerProduct(dx.matrix, dy.matrix);
  out.makeCompressed();
  return out;
}

SparseOperator fd_operator_2d(const Grid2D &grid, Index i, Index j) {
  return fd_operator_2d(fd_operator_1d(grid.intervals(), i, grid.h()),
                        fd_operator_1d(grid.intervals(), j, grid.h()));
}

struct WeightFactor::Cholesky {
  SparseOperator lower; // L with P Pi Pᵀ = L Lᵀ
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_inv;
  SparseOperator gram;
};

WeightFactor WeightFactor::scaled_identity(Index n, double scale,
                                           std::string description) {
  WeightFactor w;
  w.spatial_dim_ = n;
  w.diag_ = scale;
  w.description_ = std::move(description);
  return w;
}

WeightFactor WeightFactor::from_spd(const SparseOperator &gram,
                                    std::string description, Index block,
                                    double block_scale) {
  if (gram.rows() != gram.cols())
    throw Error(ErrorKind::DimensionMismatch, "weight Gram matrix must be square");
  Eigen::SimplicialLLT<SparseOperator, Eigen::Lower,
                       Eigen::AMDOrdering<int>> llt(gram);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularOperator,
                "weight matrix is not positive definite");
  auto chol = std::make_shared<Cholesky>();
  chol->lower = llt.matrixL();
  chol->lower.makeCompressed();
  chol->perm = llt.permutationP();
  chol->perm_inv = llt.permutationPinv();
  chol->gram = gram;

  WeightFactor w;
  w.spatial_dim_ = gram.rows();
  w.block_ = block;
  w.block_scale_ = block_scale;
  w.chol_ = std::move(chol);
  w.description_ = std::move(description);
  return w;
}

Vector WeightFactor::spatial(const Vector &v, Op op) const {
  if (!chol_) {
    switch (op) {
    case Op::Forward:
    case Op::Transpose: return diag_ * v;
    case Op::Inverse:
    case Op::InverseTranspose: return v / diag_;
    }
  }
  const auto &c = *chol_;
  switch (op) {
  case Op::Forward: {
    Vector pv = c.perm * v;
    return c.lower.transpose() * pv;
  }
  case Op::Transpose: {
    Vector lv = c.lower * v;
    return c.perm_inv * lv;
  }
  case Op::Inverse: {
    Vector w = c.lower.transpose().triangularView<Eigen::Upper>().solve(v);
    return c.perm_inv * w;
  }
  case Op::InverseTranspose: {
    Vector pv = c.perm * v;
    return c.lower.triangularView<Eigen::Lower>().solve(pv);
  }
  }
  return v;
}

Vector WeightFactor::apply_op(const Vector &v, Op op) const {
  if (v.size() != dim())
    throw Error(ErrorKind::DimensionMismatch,
                "weight factor of dimension " + std::to_string(dim()) +
                    " applied to vector of size " + std::to_string(v.size()));
  const double c = (op == Op::Inverse || op == Op::InverseTranspose)
                       ? 1.0 / block_scale_
                       : block_scale_;
  if (block_ == 1)
    return c * spatial(v, op);

  // Velocity-minor layout: component l of node s sits at s * block + l.
  Eigen::Map<const DenseMatrix> by_node(v.data(), block_, spatial_dim_);
  DenseMatrix out(block_, spatial_dim_);
  for (Index l = 0; l < block_; ++l) {
    Vector slice = by_node.row(l).transpose();
    out.row(l) = c * spatial(slice, op).transpose();
  }
  return Eigen::Map<const Vector>(out.data(), out.size());
}

DenseMatrix WeightFactor::apply_cols(const DenseMatrix &m, Op op) const {
  DenseMatrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    out.col(j) = apply_op(m.col(j), op);
  return out;
}

Vector WeightFactor::apply(const Vector &v) const { return apply_op(v, Op::Forward); }
Vector WeightFactor::apply_transpose(const Vector &v) const {
  return apply_op(v, Op::Transpose);
}
Vector WeightFactor::apply_inverse(const Vector &v) const {
  return apply_op(v, Op::Inverse);
}
Vector WeightFactor::apply_inverse_transpose(const Vector &v) const {
  return apply_op(v, Op::InverseTranspose);
}
DenseMatrix WeightFactor::apply(const DenseMatrix &m) const {
  return apply_cols(m, Op::Forward);
}
DenseMatrix WeightFactor::apply_transpose(const DenseMatrix &m) const {
  return apply_cols(m, Op::Transpose);
}
DenseMatrix WeightFactor::apply_inverse(const DenseMatrix &m) const {
  return apply_cols(m, Op::Inverse);
}
DenseMatrix WeightFactor::apply_inverse_transpose(const DenseMatrix &m) const {
  return apply_cols(m, Op::InverseTranspose);
}

SparseOperator WeightFactor::gram() const {
  SparseOperator spatial_gram(spatial_dim_, spatial_dim_);
  if (chol_) {
    spatial_gram = chol_->gram;
  } else {
    spatial_gram.setIdentity();
    spatial_gram *= diag_ * diag_;
  }
  if (block_ == 1 && block_scale_ == 1.0)
    return spatial_gram;
  SparseOperator id(block_, block_);
  id.setIdentity();
  id *= block_scale_ * block_scale_;
  SparseOperator out = Eigen::kroneckerProduct(spatial_gram, id);
  out.makeCompressed();
  return out;
}

double WeightFactor::inner(const Vector &a, const Vector &b) const {
  return apply(a).dot(apply(b));
}

double WeightFactor::norm(const Vector &a) const { return apply(a).norm(); }

namespace {

SparseOperator sobolev_gram(Index p, const Grid2D &grid) {
  const Index m = grid.intervals();
  const double h = grid.h();
  std::vector<DiffOp1D> d;
  for (Index k = 0; k <= p; ++k)
    d.push_back(fd_operator_1d(m, k, h));
  SparseOperator gram(grid.size(), grid.size());
  for (Index k = 0; k <= p; ++k) {
    for (Index i = 0; i <= k; ++i) {
      SparseOperator dij = fd_operator_2d(d[i], d[k - i]);
      gram += SparseOperator(dij.transpose() * dij);
    }
  }
  gram *= h * h;
  gram.makeCompressed();
  return gram;
}

} // namespace

WeightFactor build_sobolev_weight(Index p, const Grid2D &grid) {
  const std::string desc = "H^" + std::to_string(p);
  if (p == 0)
    return WeightFactor::scaled_identity(grid.size(), grid.h(), desc);
  return WeightFactor::from_spd(sobolev_gram(p, grid), desc);
}

WeightFactor build_rte_weight(Index p, const PhaseGrid &pg) {
  const Grid2D &grid = pg.space();
  const double vscale = 1.0 / std::sqrt(static_cast<double>(pg.angles()));
  const std::string desc = "H^(" + std::to_string(p) + ",0)";
  if (p == 0) {
    // h * N_v^{-1/2} on every entry.
    return WeightFactor::scaled_identity(pg.size(), grid.h() * vscale, desc);
  }
  return WeightFactor::from_spd(sobolev_gram(p, grid), desc, pg.angles(),
                                vscale);
}

WeightFactor build_sobolev_weight_1d(Index p, Index m_intervals, double h) {
  const Index n = m_intervals - 1;
  const std::string desc = "H^" + std::to_string(p) + " (1D)";
  if (p == 0)
    return WeightFactor::scaled_identity(n, std::sqrt(h), desc);
  SparseOperator gram(n, n);
  for (Index k = 0; k <= p; ++k) {
    const DiffOp1D d = fd_operator_1d(m_intervals, k, h);
    gram += SparseOperator(d.matrix.transpose() * d.matrix);
  }
  gram *= h;
  gram.makeCompressed();
  return WeightFactor::from_spd(gram, desc);
}

double energy_norm(const Vector &u, const Grid2D &grid) {
  if (u.size() != grid.size())
    throw Error(ErrorKind::DimensionMismatch, "energy_norm: field size mismatch");
  const double h = grid.h();
  const SparseOperator dx = fd_operator_2d(grid, 1, 0);
  const SparseOperator dy = fd_operator_2d(grid, 0, 1);
  const double sq = h * h * (dx * u).squaredNorm() + h * h * (dy * u).squaredNorm();
  return std::sqrt(sq);
}

} // namespace optbasis
