#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "optbasis/linalg.hpp"
#include "optbasis/sobolev.hpp"

namespace optbasis {

enum class ProblemTag : std::uint8_t {
  Custom = 0,
  Elliptic = 1,
  Rte = 2,
  SemilinearElliptic = 3,
  SemilinearRte = 4,
  Identity = 5,
  Elliptic1D = 6,
};

struct BasisMetadata {
  ProblemTag tag = ProblemTag::Custom;
  Index sobolev_order = 0;
  std::uint64_t seed = 0;
  Index oversample = 0;
  Index power = 0;
  Index requested_rank = 0;
};

/// Singular triplets of the weighted Green's operator: G v_i = lambda_i u_i,
/// u_iᵀ Pi_Y u_j = v_iᵀ Pi_X v_j = delta_ij, lambdas descending.
struct SVDBasis {
  Vector lambdas;
  DenseMatrix u_hat; ///< N x r, columns u_i
  DenseMatrix v_hat; ///< N x r, columns v_i
  BasisMetadata meta;

  Index size() const noexcept { return u_hat.rows(); }
  Index rank() const noexcept { return lambdas.size(); }
  /// True when fewer than the requested number of triplets were recovered.
  bool rank_deficient() const noexcept { return rank() < meta.requested_rank; }
};

struct RsvdParams {
  Index rank = 10;
  Index oversample = 5;
  Index power = 2; ///< q, subspace iterations; 0 gives the plain range finder
  std::uint64_t seed = 0;
  /// Re-diagonalize G V over the sketched subspace so that G v_i = lambda_i u_i
  /// and the weighted orthonormality hold to solve accuracy. When false the
  /// triplets are formed directly from the small SVD of B.
  bool rayleigh_ritz = true;
};

/// Standard-normal matrix from a counter-based SplitMix64 stream; entry (i, j)
/// depends only on (seed, j * rows + i), so results are platform independent.
DenseMatrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

/// Randomized optimal-basis finder for A = F_Y G F_X^{-1}, G = L^{-1}:
/// sketch with Gaussian P through L-solves, q rounds of subspace iteration
/// with Lᵀ-solves, QR, B = Qᵀ A through Lᵀ-solves, small SVD, map back.
SVDBasis compute_basis(const FactorizedSolver &fs, const WeightFactor &fx,
                       const WeightFactor &fy, const RsvdParams &params);

/// Guard for dense oracles (O(N^3) work, N^2 memory).
inline constexpr Index kDenseOracleLimit = 4096;

/// Dense G, materialized with N solves.
DenseMatrix dense_green(const FactorizedSolver &fs);

/// Dense F_Y G F_X^{-1}.
DenseMatrix weighted_green(const DenseMatrix &green, const WeightFactor &fx,
                           const WeightFactor &fy);

/// Weighted SVD of an already materialized G, all N triplets.
SVDBasis weighted_svd(const DenseMatrix &green, const WeightFactor &fx,
                      const WeightFactor &fy);

/// Exact weighted SVD of G, all N triplets. Throws ProblemTooLarge above
/// kDenseOracleLimit.
SVDBasis dense_svd_oracle(const SparseOperator &op, const WeightFactor &fx,
                          const WeightFactor &fy);

/// Max entry of |Ûᵀ Pi_Y Û - I| and |V̂ᵀ Pi_X V̂ - I|.
double orthonormality_defect(const SVDBasis &basis, const WeightFactor &fx,
                             const WeightFactor &fy);

/// max over i of |G v_i - lambda_i u_i| / |lambda_i u_i|, one solve per index.
double forward_relation_defect(const SVDBasis &basis, const FactorizedSolver &fs,
                               std::span<const Index> indices);

/// max over i of |G* u_i - lambda_i v_i| / |lambda_i v_i|, with
/// G* = Pi_X^{-1} Gᵀ Pi_Y.
double adjoint_relation_defect(const SVDBasis &basis, const FactorizedSolver &fs,
                               const WeightFactor &fx, const WeightFactor &fy,
                               std::span<const Index> indices);

/// Coefficient and synthesis maps for the first n triplets of a basis:
///   coefficients(g)_i = <g, v_i>_X,  synthesize(c) = sum_i lambda_i c_i u_i,
///   expand(c) = sum_i c_i v_i.
/// F_X V_n is formed once, so repeated projections cost two dense products.
/// Keeps references to basis and fx.
class BasisProjector {
public:
  /// Throws RankExhausted if n > basis.rank().
  BasisProjector(const SVDBasis &basis, const WeightFactor &fx, Index n);

  Index count() const noexcept { return n_; }
  Vector coefficients(const Vector &g) const;
  Vector synthesize(const Vector &c) const;
  Vector expand(const Vector &c) const;
  /// |g - expand(coefficients(g))|_X
  double residual_norm(const Vector &g) const;

private:
  const SVDBasis *basis_;
  const WeightFactor *fx_;
  Index n_;
  DenseMatrix fv_; // F_X V_n
};

std::string to_string(ProblemTag tag);

} // namespace optbasis
