#include "optbasis/rsvd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace optbasis {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1], 53 bits.
double unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// A = F_Y G F_X^{-1} applied to the columns of x.
DenseMatrix apply_weighted(const FactorizedSolver &fs, const WeightFactor &fx,
                           const WeightFactor &fy, const DenseMatrix &x) {
  return fy.apply(fs.solve_multi(fx.apply_inverse(x), false));
}

// Aᵀ = F_X^{-T} Gᵀ F_Yᵀ applied to the columns of y.
DenseMatrix apply_weighted_adjoint(const FactorizedSolver &fs,
                                   const WeightFactor &fx, const WeightFactor &fy,
                                   const DenseMatrix &y) {
  return fx.apply_inverse_transpose(fs.solve_multi(fy.apply_transpose(y), true));
}

Index count_significant(const Vector &s) {
  if (s.size() == 0 || !(s[0] > 0.0))
    return 0;
  const double floor = 1e-14 * s[0];
  Index k = 0;
  while (k < s.size() && s[k] > floor)
    ++k;
  return k;
}

} // namespace

DenseMatrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  DenseMatrix p(rows, cols);
  const std::uint64_t stream = splitmix64(seed);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const auto counter = static_cast<std::uint64_t>(j * rows + i);
      const double u1 = unit_open(splitmix64(stream ^ (2 * counter)));
      const double u2 = unit_open(splitmix64(stream ^ (2 * counter + 1)));
      p(i, j) = std::sqrt(-2.0 * std::log(u1)) *
                std::cos(2.0 * std::numbers::pi * u2);
    }
  return p;
}

SVDBasis compute_basis(const FactorizedSolver &fs, const WeightFactor &fx,
                       const WeightFactor &fy, const RsvdParams &params) {
  const Index n = fs.size();
  if (fx.dim() != n || fy.dim() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "weight factors must match the operator size");
  if (params.rank < 1 || params.oversample < 0 || params.power < 0)
    throw Error(ErrorKind::ConfigInvalid, "rank >= 1, oversample >= 0, power >= 0");
  const Index sketch = params.rank + params.oversample;
  if (sketch > n)
    throw Error(ErrorKind::DimensionMismatch,
                "rank + oversample = " + std::to_string(sketch) +
                    " exceeds N = " + std::to_string(n));

  // Range finder: Q spans A P, refined by q rounds of subspace iteration.
  const DenseMatrix p = gaussian_matrix(n, sketch, params.seed);
  DenseMatrix q = qr_thin(apply_weighted(fs, fx, fy, p)).q;
  for (Index it = 0; it < params.power; ++it) {
    const DenseMatrix w = qr_thin(apply_weighted_adjoint(fs, fx, fy, q)).q;
    q = qr_thin(apply_weighted(fs, fx, fy, w)).q;
  }

  // Bᵀ = Aᵀ Q = F_X^{-T} E with Lᵀ E = F_Yᵀ Q; the right singular vectors of
  // B are the left singular vectors of Bᵀ.
  const DenseMatrix bt = apply_weighted_adjoint(fs, fx, fy, q);
  const DenseSvd small = svd_dense(bt);

  SVDBasis out;
  out.meta.seed = params.seed;
  out.meta.oversample = params.oversample;
  out.meta.power = params.power;
  out.meta.requested_rank = params.rank;

  DenseMatrix v_tilde;
  DenseMatrix u_tilde;
  Vector lambdas;
  if (params.rayleigh_ritz) {
    // Z = A Ṽ = U_z S W_zᵀ; rotating Ṽ by W_z gives A ṽ_i = s_i u_z,i exactly.
    const DenseMatrix z = apply_weighted(fs, fx, fy, small.u);
    const DenseSvd ritz = svd_dense(z);
    v_tilde = small.u * ritz.v;
    u_tilde = ritz.u;
    lambdas = ritz.s;
  } else {
    v_tilde = small.u;
    lambdas = small.s;
  }

  const Index keep = std::min(params.rank, count_significant(lambdas));
  out.lambdas = lambdas.head(keep);
  out.v_hat = fx.apply_inverse(DenseMatrix(v_tilde.leftCols(keep)));
  if (params.rayleigh_ritz) {
    out.u_hat = fy.apply_inverse(DenseMatrix(u_tilde.leftCols(keep)));
  } else {
    out.u_hat = fs.solve_multi(out.v_hat, false);
    for (Index i = 0; i < keep; ++i)
      out.u_hat.col(i) /= out.lambdas[i];
  }
  return out;
}

DenseMatrix dense_green(const FactorizedSolver &fs) {
  return fs.solve_multi(DenseMatrix::Identity(fs.size(), fs.size()), false);
}

DenseMatrix weighted_green(const DenseMatrix &green, const WeightFactor &fx,
                           const WeightFactor &fy) {
  const DenseMatrix fyg = fy.apply(green);
  // (F_Y G) F_X^{-1} = (F_X^{-T} (F_Y G)ᵀ)ᵀ
  return fx.apply_inverse_transpose(DenseMatrix(fyg.transpose())).transpose();
}

SVDBasis weighted_svd(const DenseMatrix &green, const WeightFactor &fx,
                      const WeightFactor &fy) {
  const Index n = green.rows();
  if (green.cols() != n || fx.dim() != n || fy.dim() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "weight factors must match the operator size");
  const DenseSvd svd = svd_dense(weighted_green(green, fx, fy));
  SVDBasis out;
  out.lambdas = svd.s;
  out.u_hat = fy.apply_inverse(svd.u);
  out.v_hat = fx.apply_inverse(svd.v);
  out.meta.requested_rank = n;
  return out;
}

SVDBasis dense_svd_oracle(const SparseOperator &op, const WeightFactor &fx,
                          const WeightFactor &fy) {
  const Index n = op.rows();
  if (n > kDenseOracleLimit)
    throw Error(ErrorKind::ProblemTooLarge,
                "dense oracle limited to N <= " +
                    std::to_string(kDenseOracleLimit) + ", got " +
                    std::to_string(n));
  if (fx.dim() != n || fy.dim() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "weight factors must match the operator size");
  return weighted_svd(dense_green(FactorizedSolver(op)), fx, fy);
}

double orthonormality_defect(const SVDBasis &basis, const WeightFactor &fx,
                             const WeightFactor &fy) {
  const DenseMatrix fu = fy.apply(basis.u_hat);
  const DenseMatrix fv = fx.apply(basis.v_hat);
  const DenseMatrix id = DenseMatrix::Identity(basis.rank(), basis.rank());
  const double du = (fu.transpose() * fu - id).cwiseAbs().maxCoeff();
  const double dv = (fv.transpose() * fv - id).cwiseAbs().maxCoeff();
  return std::max(du, dv);
}

double forward_relation_defect(const SVDBasis &basis, const FactorizedSolver &fs,
                               std::span<const Index> indices) {
  double worst = 0.0;
  for (Index i : indices) {
    const Vector gv = fs.solve(basis.v_hat.col(i));
    const Vector lu = basis.lambdas[i] * basis.u_hat.col(i);
    worst = std::max(worst, (gv - lu).norm() / lu.norm());
  }
  return worst;
}

double adjoint_relation_defect(const SVDBasis &basis, const FactorizedSolver &fs,
                               const WeightFactor &fx, const WeightFactor &fy,
                               std::span<const Index> indices) {
  double worst = 0.0;
  for (Index i : indices) {
    // Pi_Y u = F_Yᵀ F_Y u; Pi_X^{-1} w = F_X^{-1} F_X^{-T} w.
    const Vector pi_u = fy.apply_transpose(fy.apply(Vector(basis.u_hat.col(i))));
    const Vector gt = fs.solve_transpose(pi_u);
    const Vector adj = fx.apply_inverse(fx.apply_inverse_transpose(gt));
    const Vector lv = basis.lambdas[i] * basis.v_hat.col(i);
    worst = std::max(worst, (adj - lv).norm() / lv.norm());
  }
  return worst;
}

BasisProjector::BasisProjector(const SVDBasis &basis, const WeightFactor &fx,
                               Index n)
    : basis_(&basis), fx_(&fx), n_(n) {
  if (n < 0 || n > basis.rank())
    throw Error(ErrorKind::RankExhausted,
                "requested " + std::to_string(n) + " basis functions, basis has " +
                    std::to_string(basis.rank()));
  if (fx.dim() != basis.size())
    throw Error(ErrorKind::DimensionMismatch, "weight factor must match the basis size");
  fv_ = fx.apply(DenseMatrix(basis.v_hat.leftCols(n)));
}

Vector BasisProjector::coefficients(const Vector &g) const {
  return fv_.transpose() * fx_->apply(g);
}

Vector BasisProjector::synthesize(const Vector &c) const {
  return basis_->u_hat.leftCols(n_) * basis_->lambdas.head(n_).cwiseProduct(c);
}

Vector BasisProjector::expand(const Vector &c) const {
  return basis_->v_hat.leftCols(n_) * c;
}

double BasisProjector::residual_norm(const Vector &g) const {
  const Vector fg = fx_->apply(g);
  return (fg - fv_ * (fv_.transpose() * fg)).norm();
}

std::string to_string(ProblemTag tag) {
  switch (tag) {
  case ProblemTag::Custom: return "custom";
  case ProblemTag::Elliptic: return "elliptic";
  case ProblemTag::Rte: return "rte";
  case ProblemTag::SemilinearElliptic: return "semilinear_elliptic";
  case ProblemTag::SemilinearRte: return "semilinear_rte";
  case ProblemTag::Identity: return "identity";
  case ProblemTag::Elliptic1D: return "elliptic_1d";
  }
  return "custom";
}

} // namespace optbasis
