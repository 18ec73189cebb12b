#pragma once

#include <functional>

#include "optbasis/grid.hpp"
#include "optbasis/linalg.hpp"

namespace optbasis {

/// Multiscale medium
///   2 + sin(2 pi x1) cos(2 pi x2)
///     + (2 + 1.8 sin(2 pi x1/eps)) / (2 + 1.8 cos(2 pi x2/eps))
///     + (2 + sin(2 pi x2/eps)) / (2 + 1.8 cos(2 pi x1/eps)).
double kappa(double x1, double x2, double eps);

struct EllipticMedium {
  double epsilon = 1.0;
  double operator()(double x1, double x2) const { return kappa(x1, x2, epsilon); }
};

using Coefficient2D = std::function<double(double, double)>;

/// Flux-form 5-point stencil for -div(k grad u) with homogeneous Dirichlet
/// data; k is sampled at edge midpoints. Symmetric positive definite.
SparseOperator assemble_elliptic(const Grid2D &grid, const Coefficient2D &k);
SparseOperator assemble_elliptic(const Grid2D &grid, const EllipticMedium &medium);

/// amplitude * sin(4 pi x) sin(4 pi y) at interior nodes.
Vector eval_source_elliptic(const Grid2D &grid, double amplitude);

/// 1D flux-form -(k u')' on (0, L) with m intervals, Dirichlet ends. Used as
/// a small toy operator for the brute-force oracles.
SparseOperator assemble_elliptic_1d(double length, Index m_intervals,
                                    const std::function<double(double)> &k);

} // namespace optbasis
