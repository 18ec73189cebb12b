#pragma once

#include <functional>

#include "optbasis/grid.hpp"
#include "optbasis/linalg.hpp"

namespace optbasis {

struct RteCoefficients {
  double eps1 = 1.0; ///< Knudsen number
  double eps2 = 1.0; ///< oscillation period of the medium
  double g = 0.5;    ///< Henyey-Greenstein anisotropy, |g| < 1
};

/// Henyey-Greenstein kernel on the N_v equispaced directions, scaled so every
/// row integrates to one under the uniform weight 1/N_v.
DenseMatrix hg_kernel_matrix(double g, Index n_v);

/// Scattering coefficient kappa(x1, x2; eps2) / eps1.
double sigma_s(double x1, double x2, double eps1, double eps2);
/// Single-photon absorption coefficient.
double sigma_a(double x1, double x2, double eps1, double eps2);
/// Two-photon absorption coefficient 0.1 eps1 (2 + 0.5 cos x1 + 0.5 sin x2).
double sigma_b(double x1, double x2, double eps1);

/// Coefficient fields and kernel of a linear transport problem.
struct RteMedium {
  std::function<double(double, double)> absorption;
  std::function<double(double, double)> scattering;
  DenseMatrix kernel; ///< N_v x N_v, rows normalized under weight 1/N_v
};

RteMedium make_rte_medium(const RteCoefficients &coeff, Index n_v);

/// First-order upwind transport + collision operator with zero inflow data:
///   v.grad u + (sigma_a + sigma_s) u - sigma_s (1/N_v) sum_l' K[l][l'] u_l'.
/// Nonsymmetric; rows are diagonally dominant (an M-matrix).
SparseOperator assemble_rte(const PhaseGrid &pg, const RteMedium &medium);
SparseOperator assemble_rte(const PhaseGrid &pg, const RteCoefficients &coeff);

/// scale * exp(-|x - c|^2 / (L/4)^2 - ((cos t - 1)^2 + sin^2 t) / 0.2^2),
/// c the domain center.
Vector eval_source_rte(const PhaseGrid &pg, double scale);

} // namespace optbasis
