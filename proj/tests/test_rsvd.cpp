#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>

#include "optbasis/elliptic.hpp"
#include "optbasis/rsvd.hpp"
#include "optbasis/rte.hpp"

using namespace optbasis;

namespace {

SparseOperator diagonal(const Vector &d) {
  SparseOperator a(d.size(), d.size());
  for (Index i = 0; i < d.size(); ++i)
    a.insert(i, i) = d[i];
  a.makeCompressed();
  return a;
}

SparseOperator random_spd(Index n, std::uint64_t seed) {
  const DenseMatrix r = gaussian_matrix(n, n, seed);
  const DenseMatrix s = r * r.transpose() + static_cast<double>(n) * DenseMatrix::Identity(n, n);
  return s.sparseView();
}

RsvdParams params(Index r, Index p, Index q, std::uint64_t seed = 0) {
  RsvdParams out;
  out.rank = r;
  out.oversample = p;
  out.power = q;
  out.seed = seed;
  return out;
}

double max_rel(const Vector &a, const Vector &b, Index k) {
  return ((a.head(k) - b.head(k)).array().abs() / b.head(k).array().abs()).maxCoeff();
}

} // namespace

TEST_CASE("identity operator") {
  SparseOperator id(20, 20);
  id.setIdentity();
  const WeightFactor w = WeightFactor::scaled_identity(20, 1.0);
  const SVDBasis b = compute_basis(FactorizedSolver(id), w, w, params(5, 5, 2));
  REQUIRE(b.rank() == 5);
  CHECK((b.lambdas.array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(orthonormality_defect(b, w, w) <= 1e-12);

  const SVDBasis o = dense_svd_oracle(id, w, w);
  CHECK(o.rank() == 20);
  CHECK((o.lambdas.array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("diagonal operator") {
  const Index n = 30;
  const SparseOperator d = diagonal(Vector::LinSpaced(n, 1, n));
  const WeightFactor w = WeightFactor::scaled_identity(n, 1.0);
  Vector exact(n);
  for (Index k = 0; k < n; ++k)
    exact[k] = 1.0 / static_cast<double>(k + 1);
  const SVDBasis b = compute_basis(FactorizedSolver(d), w, w, params(6, 4, 2));
  REQUIRE(b.rank() == 6);
  // Ten sketch columns against a spectrum 1/k: the leading values converge
  // fast, the trailing ones are limited by the gap to the 11th value.
  CHECK(max_rel(b.lambdas, exact, 3) <= 1e-6);
  CHECK(max_rel(b.lambdas, exact, 6) <= 1e-2);
  for (Index i = 1; i < b.rank(); ++i)
    CHECK(b.lambdas[i] <= b.lambdas[i - 1]);

  const SVDBasis o = dense_svd_oracle(diagonal(Vector(Eigen::Vector3d(1, 2, 4))),
                                      WeightFactor::scaled_identity(3, 1.0),
                                      WeightFactor::scaled_identity(3, 1.0));
  CHECK(o.lambdas[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(o.lambdas[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(o.lambdas[2] == doctest::Approx(0.25).epsilon(1e-14));
  for (Index i = 0; i < 3; ++i) {
    CHECK(std::abs(o.u_hat(i, i)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(o.v_hat(i, i)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(o.u_hat(i, i) * o.v_hat(i, i) > 0.0);
  }
}

TEST_CASE("oracle with general SPD weights") {
  const Index n = 12;
  const SparseOperator op = random_spd(n, 3) + diagonal(Vector::LinSpaced(n, 0, 1)) ;
  const WeightFactor fx = WeightFactor::from_spd(random_spd(n, 4));
  const WeightFactor fy = WeightFactor::from_spd(random_spd(n, 5));
  const SVDBasis o = dense_svd_oracle(op, fx, fy);
  REQUIRE(o.rank() == n);
  const DenseMatrix pix = DenseMatrix(fx.gram());
  const DenseMatrix piy = DenseMatrix(fy.gram());
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  CHECK((o.v_hat.transpose() * pix * o.v_hat - id).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((o.u_hat.transpose() * piy * o.u_hat - id).cwiseAbs().maxCoeff() <= 1e-10);
  // G v_i = lambda_i u_i against an explicit inverse.
  const DenseMatrix g = DenseMatrix(op).inverse();
  const DenseMatrix lhs = g * o.v_hat;
  const DenseMatrix rhs = o.u_hat * o.lambdas.asDiagonal();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10 * rhs.cwiseAbs().maxCoeff());
  // Adjoint relation Pi_X^{-1} Gᵀ Pi_Y u_i = lambda_i v_i.
  const DenseMatrix adj = pix.inverse() * g.transpose() * piy * o.u_hat;
  CHECK((adj - o.v_hat * o.lambdas.asDiagonal()).cwiseAbs().maxCoeff() <=
        1e-9 * o.v_hat.cwiseAbs().maxCoeff() * o.lambdas[0]);
}

TEST_CASE("randomized basis against the dense oracle on the elliptic operator") {
  const Grid2D g(0.5, 16);
  const SparseOperator op = assemble_elliptic(g, EllipticMedium{1.0});
  const FactorizedSolver fs(op);
  const WeightFactor fy = build_sobolev_weight(0, g);

  SUBCASE("p = 1") {
    const WeightFactor fx = build_sobolev_weight(1, g);
    const SVDBasis o = dense_svd_oracle(op, fx, fy);
    const SVDBasis q0 = compute_basis(fs, fx, fy, params(10, 5, 0));
    const SVDBasis q2 = compute_basis(fs, fx, fy, params(10, 5, 2));
    CHECK(max_rel(q0.lambdas, o.lambdas, 5) <= 1e-2);
    CHECK(max_rel(q2.lambdas, o.lambdas, 5) <= 1e-6);
  }
  SUBCASE("p = 0 improves with power steps") {
    const WeightFactor fx = build_sobolev_weight(0, g);
    const SVDBasis o = dense_svd_oracle(op, fx, fy);
    double prev = INFINITY;
    for (Index q : {0, 1, 2, 4}) {
      const double err = max_rel(compute_basis(fs, fx, fy, params(10, 5, q)).lambdas, o.lambdas, 5);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 1e-6);
  }
}

TEST_CASE("basis invariants") {
  const std::array<Index, 3> probe{0, 4, 9};
  SUBCASE("elliptic") {
    const Grid2D g(0.5, 20);
    const FactorizedSolver fs(assemble_elliptic(g, EllipticMedium{0.25}));
    const WeightFactor fy = build_sobolev_weight(0, g);
    for (Index p : {0, 1, 2}) {
      const WeightFactor fx = build_sobolev_weight(p, g);
      const SVDBasis b = compute_basis(fs, fx, fy, params(10, 5, 2, 11));
      CHECK(orthonormality_defect(b, fx, fy) <= 1e-8);
      CHECK(forward_relation_defect(b, fs, probe) <= 1e-8);
      // The adjoint relation is exact only up to the sketch gap; the
      // leading triplet is converged.
      const std::array<Index, 1> lead{0};
      CHECK(adjoint_relation_defect(b, fs, fx, fy, lead) <= (p == 0 ? 1e-6 : 1e-8));
      CHECK_FALSE(b.rank_deficient());
      for (Index i = 1; i < b.rank(); ++i)
        CHECK(b.lambdas[i] <= b.lambdas[i - 1]);
    }
  }
  SUBCASE("transport") {
    const PhaseGrid pg(Grid2D(0.5, 8), 8);
    const FactorizedSolver fs(assemble_rte(pg, RteCoefficients{1.0, 0.25, 0.5}));
    const WeightFactor fx = build_rte_weight(1, pg);
    const WeightFactor fy = build_rte_weight(0, pg);
    const SVDBasis b = compute_basis(fs, fx, fy, params(10, 5, 2, 3));
    CHECK(orthonormality_defect(b, fx, fy) <= 1e-8);
    CHECK(forward_relation_defect(b, fs, probe) <= 1e-8);
    const std::array<Index, 1> lead{0};
    CHECK(adjoint_relation_defect(b, fs, fx, fy, lead) <= 1e-6);
    const SVDBasis more = compute_basis(fs, fx, fy, params(10, 5, 6, 3));
    CHECK(adjoint_relation_defect(more, fs, fx, fy, probe) <
          adjoint_relation_defect(b, fs, fx, fy, probe));
  }
}

TEST_CASE("plain range finder keeps the defining relations") {
  const Grid2D g(0.5, 12);
  const FactorizedSolver fs(assemble_elliptic(g, EllipticMedium{1.0}));
  const WeightFactor fx = build_sobolev_weight(1, g);
  const WeightFactor fy = build_sobolev_weight(0, g);
  RsvdParams p = params(6, 6, 2);
  p.rayleigh_ritz = false;
  const SVDBasis b = compute_basis(fs, fx, fy, p);
  const std::array<Index, 2> probe{0, 2};
  CHECK(forward_relation_defect(b, fs, probe) <= 1e-10);
  // u_i are only orthonormal to the accuracy of the sketch here.
  CHECK(orthonormality_defect(b, fx, fy) <= 1e-4);
}

TEST_CASE("determinism and seeds") {
  const Grid2D g(0.5, 12);
  const FactorizedSolver fs(assemble_elliptic(g, EllipticMedium{0.0625}));
  const WeightFactor fx = build_sobolev_weight(1, g);
  const WeightFactor fy = build_sobolev_weight(0, g);
  const SVDBasis a = compute_basis(fs, fx, fy, params(8, 4, 1, 42));
  const SVDBasis b = compute_basis(fs, fx, fy, params(8, 4, 1, 42));
  CHECK((a.lambdas - b.lambdas).norm() == 0.0);
  CHECK((a.u_hat - b.u_hat).norm() == 0.0);
  const SVDBasis c = compute_basis(fs, fx, fy, params(8, 4, 1, 43));
  CHECK((a.lambdas - c.lambdas).norm() > 0.0);
  CHECK(a.meta.seed == 42);
  CHECK(a.meta.requested_rank == 8);
}

TEST_CASE("argument errors") {
  SparseOperator id(10, 10);
  id.setIdentity();
  const FactorizedSolver fs(id);
  const WeightFactor w = WeightFactor::scaled_identity(10, 1.0);
  auto kind_of = [](auto &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
  };
  CHECK(kind_of([&] { compute_basis(fs, w, w, params(8, 3, 0)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] {
          compute_basis(fs, WeightFactor::scaled_identity(9, 1.0), w, params(2, 1, 0));
        }) == ErrorKind::DimensionMismatch);
  SparseOperator big(kDenseOracleLimit + 1, kDenseOracleLimit + 1);
  big.setIdentity();
  const WeightFactor wb = WeightFactor::scaled_identity(kDenseOracleLimit + 1, 1.0);
  CHECK(kind_of([&] { dense_svd_oracle(big, wb, wb); }) == ErrorKind::ProblemTooLarge);
}

TEST_CASE("basis projector") {
  const Grid2D g(0.5, 10);
  const SparseOperator op = assemble_elliptic(g, EllipticMedium{1.0});
  const WeightFactor fx = build_sobolev_weight(1, g);
  const WeightFactor fy = build_sobolev_weight(0, g);
  const SVDBasis o = dense_svd_oracle(op, fx, fy);
  const Index n = 6;
  const BasisProjector proj(o, fx, n);
  CHECK(proj.count() == n);
  const Vector f = gaussian_matrix(g.size(), 1, 1).col(0);
  const Vector c = proj.coefficients(f);
  const DenseMatrix pix = DenseMatrix(fx.gram());
  for (Index i = 0; i < n; ++i)
    CHECK(c[i] == doctest::Approx(Vector(o.v_hat.col(i)).dot(pix * f)).epsilon(1e-10));
  Vector syn = Vector::Zero(g.size());
  for (Index i = 0; i < n; ++i)
    syn += o.lambdas[i] * c[i] * o.u_hat.col(i);
  CHECK((proj.synthesize(c) - syn).norm() <= 1e-12 * syn.norm());
  const Vector e = proj.expand(c);
  CHECK(proj.residual_norm(f) == doctest::Approx(fx.norm(f - e)).epsilon(1e-10));
  // Expansion of a basis vector is exact.
  CHECK(proj.residual_norm(o.v_hat.col(2)) <= 1e-10);
  CHECK_THROWS_AS(BasisProjector(o, fx, o.rank() + 1), Error);
}
