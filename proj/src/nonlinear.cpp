#include "optbasis/nonlinear.hpp"

#include <cmath>
#include <string>

#include "optbasis/rte.hpp"

namespace optbasis {

NonlinearTerm NonlinearTerm::zero() { return NonlinearTerm(); }

NonlinearTerm NonlinearTerm::cubic() {
  NonlinearTerm t;
  t.kind_ = Kind::Cubic;
  return t;
}

NonlinearTerm NonlinearTerm::two_photon(const PhaseGrid &pg, double eps1) {
  NonlinearTerm t;
  t.kind_ = Kind::TwoPhoton;
  t.n_v_ = pg.angles();
  const Grid2D &grid = pg.space();
  t.sigma_b_.resize(grid.size());
  for (Index ix = 0; ix < grid.points(); ++ix)
    for (Index iy = 0; iy < grid.points(); ++iy)
      t.sigma_b_[grid.node(ix, iy)] = sigma_b(grid.x(ix), grid.y(iy), eps1);
  return t;
}

Vector NonlinearTerm::evaluate(const Vector &u) const {
  switch (kind_) {
  case Kind::Zero:
    return Vector::Zero(u.size());
  case Kind::Cubic:
    return u.array().cube().matrix();
  case Kind::TwoPhoton: {
    if (u.size() != sigma_b_.size() * n_v_)
      throw Error(ErrorKind::DimensionMismatch, "field size does not match the phase grid");
    Vector out(u.size());
    for (Index node = 0; node < sigma_b_.size(); ++node) {
      const auto slice = u.segment(node * n_v_, n_v_);
      const double avg = slice.sum() / static_cast<double>(n_v_);
      out.segment(node * n_v_, n_v_) = sigma_b_[node] * avg * slice;
    }
    return out;
  }
  }
  return Vector::Zero(u.size());
}

SparseOperator NonlinearTerm::jacobian(const Vector &u) const {
  const Index n = u.size();
  SparseOperator j(n, n);
  std::vector<Triplet> t;
  switch (kind_) {
  case Kind::Zero:
    break;
  case Kind::Cubic:
    t.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k)
      t.emplace_back(k, k, 3.0 * u[k] * u[k]);
    break;
  case Kind::TwoPhoton: {
    if (n != sigma_b_.size() * n_v_)
      throw Error(ErrorKind::DimensionMismatch, "field size does not match the phase grid");
    const double w = 1.0 / static_cast<double>(n_v_);
    t.reserve(static_cast<std::size_t>(n * n_v_));
    for (Index node = 0; node < sigma_b_.size(); ++node) {
      const Index base = node * n_v_;
      const double avg = u.segment(base, n_v_).sum() * w;
      for (Index l = 0; l < n_v_; ++l)
        for (Index lp = 0; lp < n_v_; ++lp) {
          const double d = (l == lp ? avg : 0.0) + u[base + l] * w;
          t.emplace_back(base + l, base + lp, sigma_b_[node] * d);
        }
    }
    break;
  }
  }
  j.setFromTriplets(t.begin(), t.end());
  return j;
}

Projection project_Pn(const SVDBasis &basis, const WeightFactor &fx,
                      const Vector &g, Index n) {
  const BasisProjector proj(basis, fx, n);
  Projection out;
  out.pg = proj.expand(proj.coefficients(g));
  out.pperp = g - out.pg;
  return out;
}

FixedPointResult fixed_point_solve(const SVDBasis &basis, const WeightFactor &fx,
                                   const Vector &f, const NonlinearTerm &term,
                                   Index n, const FixedPointOptions &opts) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1)
    throw Error(ErrorKind::ConfigInvalid, "tol > 0 and max_iter >= 1 required");
  if (!(opts.relax > 0.0 && opts.relax <= 1.0))
    throw Error(ErrorKind::ConfigInvalid, "relax must lie in (0, 1]");
  const BasisProjector proj(basis, fx, n);
  const Vector lam2 = basis.lambdas.head(n).array().square().matrix();
  const double w = opts.relax;

  FixedPointResult out;
  Vector c = proj.coefficients(f);
  for (Index it = 1; it <= opts.max_iter; ++it) {
    const Vector u = proj.synthesize(c);
    const Vector target = proj.coefficients(f - term.evaluate(u));
    const Vector next = (1.0 - w) * c + w * target;
    out.step = lam2.dot((next - c).array().square().matrix());
    out.history.push_back(out.step);
    c = next;
    out.iterations = it;
    if (!c.allFinite() || c.norm() > 1e12)
      throw Error(ErrorKind::Diverged,
                  "coefficient norm blew up after " + std::to_string(it) +
                      " iterations; try a smaller relaxation");
    if (out.step < opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.solution = proj.synthesize(c);
  out.coefficients = std::move(c);
  return out;
}

ErrorIndicators error_indicators(const SVDBasis &basis, const WeightFactor &fx,
                                 const Vector &f, const NonlinearTerm &term,
                                 const Vector &u_candidate,
                                 const FixedPointResult &fixed_point, Index n) {
  const BasisProjector proj(basis, fx, n);
  ErrorIndicators e;
  e.e1 = proj.residual_norm(f - term.evaluate(u_candidate));
  e.e2 = proj.residual_norm(f - term.evaluate(fixed_point.solution));
  return e;
}

ErrorIndicators error_indicators(const SVDBasis &basis, const WeightFactor &fx,
                                 const Vector &f, const NonlinearTerm &term,
                                 const Vector &u_candidate, Index n) {
  return error_indicators(basis, fx, f, term, u_candidate,
                          fixed_point_solve(basis, fx, f, term, n), n);
}

RepresentationBound check_linear_representation_bound(
    const SVDBasis &basis, const WeightFactor &fx, const WeightFactor &fy,
    const Vector &f, const NonlinearTerm &term, const Vector &u_ref, Index n) {
  if (n >= basis.rank())
    throw Error(ErrorKind::RankExhausted,
                "bound needs lambda_{n+1}; basis has only " +
                    std::to_string(basis.rank()) + " values");
  const BasisProjector proj(basis, fx, n);
  const Vector nu = term.evaluate(u_ref);
  const Vector un = proj.synthesize(proj.coefficients(f - nu));
  RepresentationBound b;
  b.lhs = fy.norm(u_ref - un);
  b.rhs = basis.lambdas[n] * (fx.norm(f) + fx.norm(nu));
  b.holds = b.lhs <= b.rhs * (1.0 + 1e-8);
  return b;
}

NewtonResult newton_reference(const SparseOperator &op, const NonlinearTerm &term,
                              const Vector &f, double tol, Index max_iter) {
  if (op.rows() != f.size())
    throw Error(ErrorKind::DimensionMismatch, "f must match the operator size");
  auto residual = [&](const Vector &u) -> Vector {
    return op * u + term.evaluate(u) - f;
  };
  NewtonResult out;
  out.solution = FactorizedSolver(op).solve(f);
  Vector r = residual(out.solution);
  double rnorm = r.norm();
  for (Index it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    const SparseOperator jac = op + term.jacobian(out.solution);
    const Vector du = -FactorizedSolver(jac).solve(r);
    double alpha = 1.0;
    Vector trial = out.solution + du;
    Vector rt = residual(trial);
    while (rt.norm() > (1.0 - 1e-4 * alpha) * rnorm && alpha > 1e-6) {
      alpha *= 0.5;
      trial = out.solution + alpha * du;
      rt = residual(trial);
    }
    out.solution = std::move(trial);
    r = std::move(rt);
    rnorm = r.norm();
    if (!out.solution.allFinite())
      throw Error(ErrorKind::Diverged, "Newton iterate went non-finite");
    if (du.norm() <= tol * out.solution.norm()) {
      out.converged = true;
      break;
    }
  }
  out.residual = rnorm;
  return out;
}

} // namespace optbasis
