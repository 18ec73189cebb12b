#include "optbasis/rte.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "optbasis/elliptic.hpp"

namespace optbasis {

using std::numbers::pi;

DenseMatrix hg_kernel_matrix(double g, Index n_v) {
  if (!(std::abs(g) < 1.0))
    throw Error(ErrorKind::ConfigInvalid, "anisotropy g must satisfy |g| < 1");
  const PhaseGrid dirs(Grid2D(1.0, 2), n_v);
  DenseMatrix k(n_v, n_v);
  for (Index l = 0; l < n_v; ++l)
    for (Index lp = 0; lp < n_v; ++lp) {
      const double mu = std::cos(dirs.theta(l) - dirs.theta(lp));
      k(l, lp) = (1.0 - g * g) / std::pow(1.0 + g * g - 2.0 * g * mu, 1.5);
    }
  for (Index l = 0; l < n_v; ++l)
    k.row(l) *= static_cast<double>(n_v) / k.row(l).sum();
  return k;
}

double sigma_s(double x1, double x2, double eps1, double eps2) {
  return kappa(x1, x2, eps2) / eps1;
}

double sigma_a(double x1, double x2, double eps1, double eps2) {
  return eps1 * (1.0 + std::sin(4.0 * x1 * x1 * x2 * x2) +
                 (1.1 + std::cos(2 * pi * x1 / eps2)) /
                     (1.1 + std::cos(2 * pi * x2 / eps2)) +
                 (1.1 + std::sin(pi * x2 / eps2)) /
                     (1.1 + std::sin(pi * x1 / eps2)));
}

double sigma_b(double x1, double x2, double eps1) {
  return 0.1 * eps1 * (2.0 + 0.5 * std::cos(x1) + 0.5 * std::sin(x2));
}

RteMedium make_rte_medium(const RteCoefficients &coeff, Index n_v) {
  if (!(coeff.eps1 > 0.0) || !(coeff.eps2 > 0.0))
    throw Error(ErrorKind::ConfigInvalid, "eps1 and eps2 must be positive");
  RteMedium m;
  m.absorption = [=](double x1, double x2) {
    return sigma_a(x1, x2, coeff.eps1, coeff.eps2);
  };
  m.scattering = [=](double x1, double x2) {
    return sigma_s(x1, x2, coeff.eps1, coeff.eps2);
  };
  m.kernel = hg_kernel_matrix(coeff.g, n_v);
  return m;
}

SparseOperator assemble_rte(const PhaseGrid &pg, const RteMedium &medium) {
  const Grid2D &grid = pg.space();
  const Index n = grid.points();
  const Index nv = pg.angles();
  if (medium.kernel.rows() != nv || medium.kernel.cols() != nv)
    throw Error(ErrorKind::DimensionMismatch, "kernel size must equal N_v");
  const double h = grid.h();
  const double w = pg.weight();
  // cos/sin below this are treated as exact zeros (e.g. theta = pi/2).
  constexpr double axis_tol = 1e-12;

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(pg.size() * (nv + 3)));
  for (Index ix = 0; ix < n; ++ix) {
    for (Index iy = 0; iy < n; ++iy) {
      const Index node = grid.node(ix, iy);
      const double x = grid.x(ix), y = grid.y(iy);
      const double sa = medium.absorption(x, y);
      const double ss = medium.scattering(x, y);
      for (Index l = 0; l < nv; ++l) {
        const Index row = pg.index(node, l);
        const double c = std::cos(pg.theta(l)), s = std::sin(pg.theta(l));
        double diag = sa + ss;
        if (c > axis_tol) {
          diag += c / h;
          if (ix > 0) t.emplace_back(row, pg.index(grid.node(ix - 1, iy), l), -c / h);
        } else if (c < -axis_tol) {
          diag -= c / h;
          if (ix + 1 < n) t.emplace_back(row, pg.index(grid.node(ix + 1, iy), l), c / h);
        }
        if (s > axis_tol) {
          diag += s / h;
          if (iy > 0) t.emplace_back(row, pg.index(grid.node(ix, iy - 1), l), -s / h);
        } else if (s < -axis_tol) {
          diag -= s / h;
          if (iy + 1 < n) t.emplace_back(row, pg.index(grid.node(ix, iy + 1), l), s / h);
        }
        t.emplace_back(row, row, diag);
        if (ss != 0.0)
          for (Index lp = 0; lp < nv; ++lp)
            t.emplace_back(row, pg.index(node, lp), -ss * w * medium.kernel(l, lp));
      }
    }
  }
  SparseOperator op(pg.size(), pg.size());
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

SparseOperator assemble_rte(const PhaseGrid &pg, const RteCoefficients &coeff) {
  return assemble_rte(pg, make_rte_medium(coeff, pg.angles()));
}

Vector eval_source_rte(const PhaseGrid &pg, double scale) {
  const Grid2D &grid = pg.space();
  const double c = grid.length() / 2;
  const double width2 = std::pow(grid.length() / 4, 2);
  Vector f(pg.size());
  for (Index ix = 0; ix < grid.points(); ++ix)
    for (Index iy = 0; iy < grid.points(); ++iy) {
      const double r2 = std::pow(grid.x(ix) - c, 2) + std::pow(grid.y(iy) - c, 2);
      for (Index l = 0; l < pg.angles(); ++l) {
        const double th = pg.theta(l);
        const double ang = std::pow(std::cos(th) - 1.0, 2) + std::pow(std::sin(th), 2);
        f[pg.index(grid.node(ix, iy), l)] =
            scale * std::exp(-r2 / width2 - ang / 0.04);
      }
    }
  return f;
}

} // namespace optbasis
