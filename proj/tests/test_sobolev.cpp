#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "optbasis/grid.hpp"
#include "optbasis/rsvd.hpp"
#include "optbasis/sobolev.hpp"

using namespace optbasis;

namespace {

Vector sample(const Grid2D &g, double (*f)(double, double)) {
  Vector v(g.size());
  for (Index ix = 0; ix < g.points(); ++ix)
    for (Index iy = 0; iy < g.points(); ++iy)
      v[g.node(ix, iy)] = f(g.x(ix), g.y(iy));
  return v;
}

// Independent assembly of h^2 sum_k sum_i (D^{i,k-i})ᵀ D^{i,k-i} from dense
// Kronecker products of the 1D operators.
DenseMatrix pi_oracle(Index p, const Grid2D &g) {
  const Index n = g.points();
  DenseMatrix pi = DenseMatrix::Zero(g.size(), g.size());
  for (Index k = 0; k <= p; ++k)
    for (Index i = 0; i <= k; ++i) {
      const DenseMatrix dx = DenseMatrix(fd_operator_1d(g.intervals(), i, g.h()).matrix);
      const DenseMatrix dy = DenseMatrix(fd_operator_1d(g.intervals(), k - i, g.h()).matrix);
      DenseMatrix d(dx.rows() * dy.rows(), n * n);
      for (Index a = 0; a < dx.rows(); ++a)
        for (Index b = 0; b < dx.cols(); ++b)
          d.block(a * dy.rows(), b * n, dy.rows(), n) = dx(a, b) * dy;
      pi += d.transpose() * d;
    }
  return g.h() * g.h() * pi;
}

} // namespace

TEST_CASE("1D difference operators") {
  const DiffOp1D d0 = fd_operator_1d(7, 0, 0.1);
  CHECK((DenseMatrix(d0.matrix) - DenseMatrix::Identity(6, 6)).norm() == 0.0);

  const DiffOp1D d1 = fd_operator_1d(4, 1, 0.125);
  DenseMatrix expect(2, 3);
  expect << -1, 1, 0, 0, -1, 1;
  expect *= 8.0;
  CHECK(d1.matrix.rows() == 2);
  CHECK(d1.matrix.cols() == 3);
  CHECK((DenseMatrix(d1.matrix) - expect).cwiseAbs().maxCoeff() <= 1e-12);

  for (Index k = 1; k <= 3; ++k) {
    const Index m = 12;
    const double h = 0.5 / m;
    const DiffOp1D dk = fd_operator_1d(m, k, h);
    CHECK(dk.matrix.rows() == m - 1 - k);
    // Annihilates polynomials of degree < k.
    Vector w(m - 1);
    for (Index i = 0; i < m - 1; ++i) {
      const double x = (i + 1) * h;
      w[i] = k == 1 ? 3.0 : (k == 2 ? 2.0 * x - 1.0 : x * x - x + 0.3);
    }
    CHECK((dk.matrix * w).cwiseAbs().maxCoeff() <= 1e-12 * std::pow(h, -k));
  }
  CHECK((fd_operator_1d(10, 2, 0.05).matrix * Vector::LinSpaced(9, 0.05, 0.45)).norm() <= 1e-9);

  try {
    fd_operator_1d(4, 3, 0.1);
    FAIL("expected OrderTooHigh");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::OrderTooHigh);
  }
}

TEST_CASE("2D difference operators") {
  const Grid2D g(0.5, 8);
  const SparseOperator d00 = fd_operator_2d(g, 0, 0);
  CHECK((DenseMatrix(d00) - DenseMatrix::Identity(g.size(), g.size())).norm() == 0.0);

  const Vector x = sample(g, [](double x, double) { return x; });
  const Vector dx = fd_operator_2d(g, 1, 0) * x;
  CHECK(dx.size() == (g.points() - 1) * g.points());
  CHECK((dx - Vector::Ones(dx.size())).cwiseAbs().maxCoeff() <= 1e-12);

  const Vector xy = sample(g, [](double x, double y) { return x + y; });
  CHECK((fd_operator_2d(g, 1, 1) * xy).cwiseAbs().maxCoeff() <= 1e-9);

  CHECK_THROWS_AS(fd_operator_2d(fd_operator_1d(8, 1, 0.1), fd_operator_1d(9, 1, 0.1)), Error);
}

TEST_CASE("Sobolev weights") {
  SUBCASE("p = 0 on the h = 0.25 grid") {
    const Grid2D g(1.0, 4);
    const WeightFactor f = build_sobolev_weight(0, g);
    const Vector ones = Vector::Ones(9);
    CHECK(f.inner(ones, ones) == doctest::Approx(0.5625).epsilon(1e-15));
    const Vector v = gaussian_matrix(9, 1, 2).col(0);
    CHECK((f.apply_inverse(v) - v / 0.25).norm() <= 1e-15 * v.norm() * 4);
  }
  SUBCASE("constants only see the zeroth-order term") {
    const Grid2D g(0.5, 10);
    const Vector c = Vector::Constant(g.size(), 1.7);
    const double h = g.h();
    const double expected = h * h * c.squaredNorm();
    CHECK(build_sobolev_weight(1, g).inner(c, c) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(build_sobolev_weight(2, g).inner(c, c) == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("factor matches the assembled weight entrywise") {
    for (Index p : {0, 1, 2}) {
      const Grid2D g(0.5, 12);
      const WeightFactor f = build_sobolev_weight(p, g);
      const DenseMatrix fd = f.apply(DenseMatrix(DenseMatrix::Identity(g.size(), g.size())));
      const DenseMatrix oracle = pi_oracle(p, g);
      const double scale = oracle.cwiseAbs().maxCoeff();
      CHECK((fd.transpose() * fd - oracle).cwiseAbs().maxCoeff() <= 1e-10 * scale);
      CHECK((DenseMatrix(f.gram()) - oracle).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
  }
  SUBCASE("factor identity on the 31 x 31 grid") {
    const Grid2D g(0.5, 32);
    const WeightFactor f = build_sobolev_weight(2, g);
    const SparseOperator pi = f.gram();
    const DenseMatrix v = gaussian_matrix(g.size(), 5, 8);
    for (Index j = 0; j < 5; ++j) {
      const Vector col = v.col(j);
      const double direct = col.dot(pi * col);
      CHECK(f.inner(col, col) == doctest::Approx(direct).epsilon(1e-10));
      CHECK((f.apply_inverse(f.apply(col)) - col).norm() <= 1e-10 * col.norm());
      CHECK((f.apply_transpose(f.apply_inverse_transpose(col)) - col).norm() <= 1e-10 * col.norm());
    }
  }
  SUBCASE("symmetric, positive definite, nondecreasing in p") {
    const Grid2D g(0.5, 9);
    const WeightFactor w0 = build_sobolev_weight(0, g);
    const WeightFactor w1 = build_sobolev_weight(1, g);
    const WeightFactor w2 = build_sobolev_weight(2, g);
    const DenseMatrix r = gaussian_matrix(g.size(), 101, 17);
    for (Index j = 0; j < 100; ++j) {
      const Vector a = r.col(j), b = r.col(j + 1);
      CHECK(w2.inner(a, b) == doctest::Approx(w2.inner(b, a)).epsilon(1e-12));
      CHECK(w1.inner(a, a) > 0.0);
      CHECK(w2.inner(a, a) > 0.0);
      CHECK(w2.inner(a, a) >= w1.inner(a, a));
      CHECK(w1.inner(a, a) >= w0.inner(a, a));
    }
  }
}

TEST_CASE("transport weights") {
  const PhaseGrid pg(Grid2D(0.5, 6), 8);
  const double h = pg.space().h();
  const WeightFactor w0 = build_rte_weight(0, pg);
  const DenseMatrix pi0 = DenseMatrix(w0.gram());
  CHECK((pi0 - (h * h / 8.0) * DenseMatrix::Identity(pg.size(), pg.size())).cwiseAbs().maxCoeff() <=
        1e-15);

  for (Index p : {1, 2}) {
    const WeightFactor ws = build_sobolev_weight(p, pg.space());
    const WeightFactor wr = build_rte_weight(p, pg);
    const Vector s = gaussian_matrix(pg.space().size(), 1, 30 + p).col(0);
    Vector lifted(pg.size());
    for (Index node = 0; node < pg.space().size(); ++node)
      lifted.segment(node * pg.angles(), pg.angles()).setConstant(s[node]);
    CHECK(wr.inner(lifted, lifted) == doctest::Approx(ws.inner(s, s)).epsilon(1e-12));

    const DenseMatrix r = gaussian_matrix(pg.size(), 2, 40 + p);
    CHECK(wr.inner(r.col(0), r.col(1)) == doctest::Approx(wr.inner(r.col(1), r.col(0))).epsilon(1e-12));
    CHECK(wr.inner(r.col(0), r.col(0)) > 0.0);
    const Vector v = r.col(0);
    CHECK((wr.apply_inverse(wr.apply(v)) - v).norm() <= 1e-10 * v.norm());
    const double direct = v.dot(wr.gram() * v);
    CHECK(wr.inner(v, v) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("energy norm") {
  const Grid2D g(0.5, 10);
  CHECK(energy_norm(Vector::Constant(g.size(), 3.0), g) <= 1e-12);
  const Vector x = sample(g, [](double x, double) { return x; });
  const double rows = static_cast<double>((g.points() - 1) * g.points());
  CHECK(energy_norm(x, g) == doctest::Approx(std::sqrt(g.h() * g.h() * rows)).epsilon(1e-12));
  const Vector u = gaussian_matrix(g.size(), 1, 5).col(0);
  CHECK(energy_norm(2.0 * u, g) == doctest::Approx(2.0 * energy_norm(u, g)).epsilon(1e-14));
}
