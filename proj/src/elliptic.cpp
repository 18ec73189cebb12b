#include "optbasis/elliptic.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace optbasis {

using std::numbers::pi;

double kappa(double x1, double x2, double eps) {
  return 2.0 + std::sin(2 * pi * x1) * std::cos(2 * pi * x2) +
         (2.0 + 1.8 * std::sin(2 * pi * x1 / eps)) /
             (2.0 + 1.8 * std::cos(2 * pi * x2 / eps)) +
         (2.0 + std::sin(2 * pi * x2 / eps)) /
             (2.0 + 1.8 * std::cos(2 * pi * x1 / eps));
}

SparseOperator assemble_elliptic(const Grid2D &grid, const Coefficient2D &k) {
  const Index n = grid.points();
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  auto mid = [h](Index edge) { return (static_cast<double>(edge) + 0.5) * h; };
  std::vector<Triplet> t;
  t.reserve(5 * grid.size());
  for (Index ix = 0; ix < n; ++ix) {
    for (Index iy = 0; iy < n; ++iy) {
      // Midpoints come from the edge index so both neighbours see the same value.
      const double x = grid.x(ix), y = grid.y(iy);
      const double kw = k(mid(ix), y), ke = k(mid(ix + 1), y);
      const double ks = k(x, mid(iy)), kn = k(x, mid(iy + 1));
      const Index row = grid.node(ix, iy);
      t.emplace_back(row, row, (kw + ke + ks + kn) * inv_h2);
      if (ix > 0) t.emplace_back(row, grid.node(ix - 1, iy), -kw * inv_h2);
      if (ix + 1 < n) t.emplace_back(row, grid.node(ix + 1, iy), -ke * inv_h2);
      if (iy > 0) t.emplace_back(row, grid.node(ix, iy - 1), -ks * inv_h2);
      if (iy + 1 < n) t.emplace_back(row, grid.node(ix, iy + 1), -kn * inv_h2);
    }
  }
  SparseOperator op(grid.size(), grid.size());
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

SparseOperator assemble_elliptic(const Grid2D &grid, const EllipticMedium &medium) {
  return assemble_elliptic(grid, Coefficient2D(medium));
}

Vector eval_source_elliptic(const Grid2D &grid, double amplitude) {
  Vector f(grid.size());
  for (Index ix = 0; ix < grid.points(); ++ix)
    for (Index iy = 0; iy < grid.points(); ++iy)
      f[grid.node(ix, iy)] = amplitude * std::sin(4 * pi * grid.x(ix)) *
                             std::sin(4 * pi * grid.y(iy));
  return f;
}

SparseOperator assemble_elliptic_1d(double length, Index m_intervals,
                                    const std::function<double(double)> &k) {
  const Index n = m_intervals - 1;
  const double h = length / static_cast<double>(m_intervals);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    const double kl = k((static_cast<double>(i) + 0.5) * h);
    const double kr = k((static_cast<double>(i) + 1.5) * h);
    t.emplace_back(i, i, (kl + kr) / (h * h));
    if (i > 0) t.emplace_back(i, i - 1, -kl / (h * h));
    if (i + 1 < n) t.emplace_back(i, i + 1, -kr / (h * h));
  }
  SparseOperator op(n, n);
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

} // namespace optbasis
