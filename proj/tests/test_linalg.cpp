#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "optbasis/linalg.hpp"
#include "optbasis/rsvd.hpp"

using namespace optbasis;

namespace {

SparseOperator from_dense(const DenseMatrix &d) { return d.sparseView(); }

SparseOperator laplacian_1d(Index n, double h) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0 / (h * h));
    if (i > 0) t.emplace_back(i, i - 1, -1.0 / (h * h));
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0 / (h * h));
  }
  SparseOperator a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

} // namespace

TEST_CASE("identity solve returns the right-hand side") {
  SparseOperator id(5, 5);
  id.setIdentity();
  const FactorizedSolver fs = factorize(id);
  Vector e3 = Vector::Zero(5);
  e3[2] = 1.0;
  CHECK((fs.solve(e3) - e3).norm() == 0.0);
  const DenseMatrix b = gaussian_matrix(5, 3, 4);
  CHECK((solve_multi(fs, b, false) - b).norm() == 0.0);
}

TEST_CASE("diagonal solve") {
  const SparseOperator d = from_dense(Vector(Eigen::Vector3d(1, 2, 4)).asDiagonal().toDenseMatrix());
  const Vector x = factorize(d).solve(Vector::Ones(3));
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(0.5));
  CHECK(x[2] == doctest::Approx(0.25));

  DenseMatrix two(1, 1);
  two(0, 0) = 2.0;
  DenseMatrix four(1, 1);
  four(0, 0) = 4.0;
  CHECK(solve_multi(factorize(from_dense(two)), four, false)(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("three-node Laplacian against its explicit inverse") {
  // (-1, 2, -1)/h^2 with h = 0.25: inverse of tridiag(-1,2,-1) is
  // (1/4) [[3,2,1],[2,4,2],[1,2,3]], so x = h^2/4 * (6, 8, 6).
  const Vector x = factorize(laplacian_1d(3, 0.25)).solve(Vector::Ones(3));
  const double s = 0.0625 / 4.0;
  CHECK(x[0] == doctest::Approx(6 * s).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(8 * s).epsilon(1e-14));
  CHECK(x[2] == doctest::Approx(6 * s).epsilon(1e-14));
}

TEST_CASE("transpose solves of a nonsymmetric 2x2") {
  DenseMatrix a(2, 2);
  a << 2, 1, 0, 3;
  const FactorizedSolver fs = factorize(from_dense(a));
  // Aᵀ = [[2,0],[1,3]]; (Aᵀ)^{-1} = [[1/2, 0], [-1/6, 1/3]].
  const DenseMatrix x = fs.solve_multi(DenseMatrix::Identity(2, 2), true);
  CHECK(x(0, 0) == doctest::Approx(0.5));
  CHECK(x(1, 0) == doctest::Approx(-1.0 / 6.0));
  CHECK(x(0, 1) == doctest::Approx(0.0));
  CHECK(x(1, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("solve residuals and transpose consistency on a random sparse operator") {
  const Index n = 60;
  DenseMatrix d = gaussian_matrix(n, n, 11);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if ((i * 7 + j * 3) % 5 != 0 && i != j)
        d(i, j) = 0.0;
  d.diagonal().array() += 10.0;
  const SparseOperator op = from_dense(d);
  const FactorizedSolver fs(op);
  const DenseMatrix b = gaussian_matrix(n, 4, 12);
  const DenseMatrix x = fs.solve_multi(b, false);
  const DenseMatrix xt = fs.solve_multi(b, true);
  for (Index j = 0; j < b.cols(); ++j) {
    const double bn = b.col(j).cwiseAbs().maxCoeff();
    CHECK((op * x.col(j) - b.col(j)).cwiseAbs().maxCoeff() <= 1e-10 * (1 + bn));
    CHECK((SparseOperator(op.transpose()) * xt.col(j) - b.col(j)).cwiseAbs().maxCoeff() <=
          1e-10 * (1 + bn));
  }
  const FactorizedSolver ft(SparseOperator(op.transpose()));
  CHECK((ft.solve_multi(b, false) - xt).norm() <= 1e-10 * xt.norm());
  // Single-column paths agree with the blocked path.
  CHECK((fs.solve(b.col(0)) - x.col(0)).norm() <= 1e-14 * x.col(0).norm());
  CHECK((fs.solve_transpose(b.col(1)) - xt.col(1)).norm() <= 1e-14 * xt.col(1).norm());
}

TEST_CASE("singular and malformed operators are rejected") {
  DenseMatrix s(3, 3);
  s << 1, 2, 3, 2, 4, 6, 0, 0, 1;
  CHECK_THROWS_AS(factorize(from_dense(s)), Error);
  try {
    factorize(from_dense(s));
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::SingularOperator);
  }
  DenseMatrix tiny = DenseMatrix::Identity(3, 3);
  tiny(2, 2) = 1e-16;
  CHECK_THROWS_AS(factorize(from_dense(tiny)), Error);
  try {
    factorize(SparseOperator(3, 4));
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
  const FactorizedSolver fs = factorize(laplacian_1d(4, 1.0));
  try {
    fs.solve_multi(DenseMatrix::Ones(3, 2), false);
    FAIL("expected DimensionMismatch");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("thin QR") {
  SUBCASE("orthonormal input is reproduced up to sign") {
    const DenseMatrix q0 = qr_thin(gaussian_matrix(8, 3, 5)).q;
    const ThinQr r = qr_thin(q0);
    CHECK(r.rank == 3);
    CHECK_FALSE(r.rank_deficient);
    CHECK((r.q * r.q.transpose() - q0 * q0.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("span of e1, e1 + e2") {
    DenseMatrix a = DenseMatrix::Zero(3, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    a(1, 1) = 1;
    const ThinQr r = qr_thin(a);
    const DenseMatrix p = r.q * r.q.transpose();
    CHECK((p * Vector::Unit(3, 0) - Vector::Unit(3, 0)).norm() <= 1e-12);
    CHECK((p * Vector::Unit(3, 1) - Vector::Unit(3, 1)).norm() <= 1e-12);
    CHECK((p * Vector::Unit(3, 2)).norm() <= 1e-12);
  }
  SUBCASE("duplicated column") {
    DenseMatrix a(4, 2);
    a.col(0) = Vector::LinSpaced(4, 1, 4);
    a.col(1) = a.col(0);
    const ThinQr r = qr_thin(a);
    CHECK(r.rank == 1);
    CHECK(r.rank_deficient);
    CHECK(r.q.cols() == 1);
    CHECK(std::abs((r.q.transpose() * r.q)(0, 0) - 1.0) <= 1e-12);
  }
  SUBCASE("orthonormality on random tall input") {
    const DenseMatrix q = qr_thin(gaussian_matrix(200, 30, 9)).q;
    CHECK((q.transpose() * q - DenseMatrix::Identity(30, 30)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS(qr_thin(DenseMatrix::Ones(2, 3)), Error);
}

TEST_CASE("dense SVD") {
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  Vector s = svd_dense(d).s;
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(1.0));

  const Vector u = 2.0 * Vector::Unit(3, 1);
  const Vector v = 5.0 * Vector::Unit(4, 2);
  s = svd_dense(u * v.transpose()).s;
  CHECK(s[0] == doctest::Approx(10.0));
  CHECK(std::abs(s[1]) <= 1e-14);

  const DenseMatrix a = gaussian_matrix(4, 6, 21);
  const DenseSvd svd = svd_dense(a);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a * a.transpose());
  const Vector ev = eig.eigenvalues().reverse(); // descending
  for (Index i = 0; i < 4; ++i)
    CHECK(svd.s[i] * svd.s[i] == doctest::Approx(ev[i]).epsilon(1e-12));
  for (Index i = 1; i < svd.s.size(); ++i)
    CHECK(svd.s[i] <= svd.s[i - 1]);
  const DenseMatrix recon = svd.u * svd.s.asDiagonal() * svd.v.transpose();
  CHECK((recon - a).cwiseAbs().maxCoeff() <= 1e-12 * svd.s[0]);
}

TEST_CASE("seeded normals are deterministic and roughly standard") {
  const DenseMatrix a = gaussian_matrix(500, 4, 3);
  const DenseMatrix b = gaussian_matrix(500, 4, 3);
  CHECK((a - b).norm() == 0.0);
  // Column-major position fixes the draw.
  CHECK(gaussian_matrix(10, 2, 3)(7, 0) == a(7, 0));
  const double mean = a.mean();
  const double var = (a.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.1);
  CHECK(std::abs(var - 1.0) < 0.1);
  CHECK((gaussian_matrix(500, 4, 4) - a).norm() > 1.0);
}
