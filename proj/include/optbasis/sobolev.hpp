#pragma once

#include <memory>
#include <string>

#include "optbasis/grid.hpp"
#include "optbasis/linalg.hpp"

namespace optbasis {

/// k-th forward divided difference on the m-1 interior samples of one axis.
/// Shape (m-1-k) x (m-1).
struct DiffOp1D {
  Index order = 0;
  double h = 0.0;
  SparseOperator matrix;
};

DiffOp1D fd_operator_1d(Index m_intervals, Index k, double h);

/// D^{i,j} = D^i (x) D^j on x-major vectorized interior fields.
SparseOperator fd_operator_2d(const DiffOp1D &dx, const DiffOp1D &dy);
SparseOperator fd_operator_2d(const Grid2D &grid, Index i, Index j);

/// A factor F with Pi = Fᵀ F, realizing the weighted inner product
/// <a, b> = aᵀ Pi b = (F a)·(F b).
///
/// The factor is structured as F = F_s (x) (c I_block): a spatial factor
/// F_s (either a scaled identity or the transposed, permuted sparse Cholesky
/// factor of the spatial Gram matrix) acting on each of `block` interleaved
/// components, times a constant c. For scalar fields block = 1, c = 1; for
/// phase-space fields block = N_v and c = N_v^{-1/2}.
class WeightFactor {
public:
  /// F = scale * I_n.
  static WeightFactor scaled_identity(Index n, double scale,
                                      std::string description = "identity");
  /// Factor an arbitrary SPD matrix. Throws SingularOperator if Cholesky fails.
  static WeightFactor from_spd(const SparseOperator &gram,
                               std::string description = "spd",
                               Index block = 1, double block_scale = 1.0);

  Index dim() const noexcept { return spatial_dim_ * block_; }
  const std::string &description() const noexcept { return description_; }

  Vector apply(const Vector &v) const;                   // F v
  Vector apply_transpose(const Vector &v) const;         // Fᵀ v
  Vector apply_inverse(const Vector &v) const;           // F⁻¹ v
  Vector apply_inverse_transpose(const Vector &v) const; // F⁻ᵀ v

  DenseMatrix apply(const DenseMatrix &m) const;
  DenseMatrix apply_transpose(const DenseMatrix &m) const;
  DenseMatrix apply_inverse(const DenseMatrix &m) const;
  DenseMatrix apply_inverse_transpose(const DenseMatrix &m) const;

  /// Assembled Pi (sparse).
  SparseOperator gram() const;

  double inner(const Vector &a, const Vector &b) const;
  double norm(const Vector &a) const;

private:
  enum class Op { Forward, Transpose, Inverse, InverseTranspose };
  struct Cholesky;

  Vector spatial(const Vector &v, Op op) const;
  Vector apply_op(const Vector &v, Op op) const;
  DenseMatrix apply_cols(const DenseMatrix &m, Op op) const;

  Index spatial_dim_ = 0;
  Index block_ = 1;
  double block_scale_ = 1.0;
  double diag_ = 1.0; // spatial scale when no Cholesky factor is held
  std::shared_ptr<const Cholesky> chol_;
  std::string description_;
};

/// Discrete H^p weight on the interior grid:
///   Pi = h^2 * sum_{k=0..p} sum_{i=0..k} (D^{i,k-i})ᵀ D^{i,k-i}.
/// For p = 0 this is h^2 I with F = h I.
WeightFactor build_sobolev_weight(Index p, const Grid2D &grid);

/// Spatial H^p weight tensored with the uniform velocity weight 1/N_v.
WeightFactor build_rte_weight(Index p, const PhaseGrid &pg);

/// One-dimensional analogue, Pi = h * sum_{k=0..p} (D^k)ᵀ D^k, for 1D toys.
WeightFactor build_sobolev_weight_1d(Index p, Index m_intervals, double h);

/// Discrete energy norm ||u||_E = sqrt(h^2 |D^{1,0}u|^2 + h^2 |D^{0,1}u|^2).
double energy_norm(const Vector &u, const Grid2D &grid);

} // namespace optbasis
