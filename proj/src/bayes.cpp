#include "optbasis/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

namespace optbasis {

namespace {

void check_dense(const DenseMatrix &green, const DenseMatrix &m) {
  const Index n = green.rows();
  if (green.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "G must be square");
  if (n > kBayesDenseLimit)
    throw Error(ErrorKind::ProblemTooLarge,
                "dense Bayesian oracle limited to N <= " +
                    std::to_string(kBayesDenseLimit) + ", got " + std::to_string(n));
  if (m.rows() != n)
    throw Error(ErrorKind::DimensionMismatch, "M must have N rows");
}

// Cholesky of an n x n SPD system matrix. Rejects anything whose reciprocal
// condition estimate is below 1e-13.
Eigen::LLT<DenseMatrix> factor_theta(const DenseMatrix &theta) {
  Eigen::LLT<DenseMatrix> llt(theta);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13))
    throw Error(ErrorKind::SingularTheta,
                "Theta = Mᵀ C M is numerically singular (rank-deficient observations)");
  return llt;
}

double max_angle(const DenseMatrix &a, const DenseMatrix &b) {
  const Vector angles = principal_angles(a, b);
  return angles.size() == 0 ? 0.0 : angles.maxCoeff();
}

} // namespace

Posterior posterior(const DenseMatrix &green, const DenseMatrix &m,
                    const Vector &psi, double delta) {
  check_dense(green, m);
  if (!(delta >= 0.0))
    throw Error(ErrorKind::ConfigInvalid, "noise variance must be >= 0");
  if (psi.size() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "Psi must have one entry per column of M");
  const Index n = green.rows();
  const DenseMatrix c = green * green.transpose();

  Posterior out;
  out.observations = m;
  out.psi = psi;
  out.delta = delta;
  if (m.cols() == 0) {
    out.mean = Vector::Zero(n);
    out.covariance = c;
    if (delta == 0.0)
      out.reconstruction = DenseMatrix::Zero(n, 0);
    return out;
  }

  const DenseMatrix k = m.transpose() * c;
  DenseMatrix s = k * m;
  s.diagonal().array() += delta;
  DenseMatrix w;
  if (delta == 0.0) {
    w = factor_theta(s).solve(k).transpose();
  } else {
    Eigen::LLT<DenseMatrix> llt(s);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::SingularTheta, "Theta + delta I is not positive definite");
    w = llt.solve(k).transpose();
  }
  out.mean = w * psi;
  DenseMatrix sigma = c - w * k;
  out.covariance = 0.5 * (sigma + sigma.transpose());
  if (delta == 0.0)
    out.reconstruction = std::move(w);
  return out;
}

TraceReport trace_objective(const DenseMatrix &green, const DenseMatrix &m) {
  check_dense(green, m);
  TraceReport r;
  r.prior_trace = green.squaredNorm();
  if (m.cols() == 0) {
    r.k = DenseMatrix::Zero(0, green.rows());
    r.theta = DenseMatrix::Zero(0, 0);
    r.residual_trace = r.prior_trace;
    return r;
  }
  const DenseMatrix mtg = m.transpose() * green;
  r.k = mtg * green.transpose();
  r.theta = r.k * m;
  const DenseMatrix tik = factor_theta(r.theta).solve(r.k); // Theta^{-1} K
  r.objective = r.k.cwiseProduct(tik).sum();
  // Tr(Sigma) through |(I - W Mᵀ) G|_F^2, independent of the objective.
  r.residual_trace = (green - tik.transpose() * mtg).squaredNorm();
  return r;
}

double trace_objective_value(const DenseMatrix &green, const DenseMatrix &m) {
  check_dense(green, m);
  if (m.cols() == 0)
    return 0.0;
  // With Y = Gᵀ M: Kᵀ Theta^{-1} K = G Q Qᵀ Gᵀ, Q an orthonormal basis of Y.
  const DenseMatrix y = green.transpose() * m;
  const ThinQr qr = qr_thin(y);
  if (qr.rank_deficient)
    throw Error(ErrorKind::SingularTheta, "observation matrix is rank deficient");
  return (green * qr.q).squaredNorm();
}

BoundCheck check_reconstruction_bound(const DenseMatrix &green,
                                      const DenseMatrix &m, const Vector &f) {
  check_dense(green, m);
  if (f.size() != green.rows())
    throw Error(ErrorKind::DimensionMismatch, "f must have N entries");
  const Vector u = green * f;
  const Posterior post = posterior(green, m, m.transpose() * u, 0.0);
  BoundCheck b;
  b.error = (u - post.reconstruction * post.psi).norm();
  b.bound = std::sqrt(std::max(0.0, post.covariance.trace())) * f.norm();
  // Slack covers the rounding floor when Tr(Sigma) is exactly zero (M = I).
  b.holds = b.error <= b.bound * (1.0 + 1e-10) + 1e-12 * u.norm();
  return b;
}

double nwidth_eval(const DenseMatrix &green, const WeightFactor &fx,
                   const WeightFactor &fy, const DenseMatrix &v) {
  check_dense(green, v);
  const DenseMatrix a = weighted_green(green, fx, fy);
  if (v.cols() == 0)
    return svd_dense(a).s[0];
  const ThinQr qr = qr_thin(fy.apply(DenseMatrix(green * v)));
  if (qr.rank_deficient)
    throw Error(ErrorKind::RankDeficient, "candidate subspace is rank deficient");
  const DenseMatrix resid = a - qr.q * (qr.q.transpose() * a);
  return svd_dense(resid).s[0];
}

Vector principal_angles(const DenseMatrix &a, const DenseMatrix &b) {
  if (a.rows() != b.rows())
    throw Error(ErrorKind::DimensionMismatch, "span bases must have equal rows");
  DenseMatrix qa = qr_thin(a).q;
  DenseMatrix qb = qr_thin(b).q;
  if (qb.cols() > qa.cols())
    std::swap(qa, qb);
  const Index k = qb.cols();
  if (k == 0)
    return Vector();
  // Cosines from Q_aᵀ Q_b, sines from (I - Q_a Q_aᵀ) Q_b; pairing them through
  // atan2 keeps small angles accurate.
  const DenseMatrix proj = qa.transpose() * qb;
  const Vector cosines = svd_dense(proj).s;                 // descending
  const Vector sines = svd_dense(DenseMatrix(qb - qa * proj)).s; // descending
  Vector out(k);
  for (Index i = 0; i < k; ++i)
    out[i] = std::atan2(sines[k - 1 - i], cosines[i]);
  return out;
}

EquivalenceReport check_equivalence(const DenseMatrix &green,
                                    const WeightFactor &fx,
                                    const WeightFactor &fy, Index n,
                                    Index candidates, std::uint64_t seed,
                                    double tol) {
  const Index dim = green.rows();
  check_dense(green, DenseMatrix(dim, 0));
  if (n < 1 || n > dim)
    throw Error(ErrorKind::DimensionMismatch, "need 1 <= n <= N");
  EquivalenceReport rep;
  rep.n = n;
  rep.candidates = candidates;

  // (a) identity weights.
  const WeightFactor id = WeightFactor::scaled_identity(dim, 1.0);
  const SVDBasis plain = weighted_svd(green, id, id);
  const DenseMatrix u_n = plain.u_hat.leftCols(n);
  const double prior = green.squaredNorm();
  rep.optimum_objective = trace_objective(green, u_n).objective;
  rep.singular_sum = plain.lambdas.head(n).squaredNorm();
  rep.best_random_objective = -1.0;
  DenseMatrix best_m;
  for (Index c = 0; c < candidates; ++c) {
    const DenseMatrix m = gaussian_matrix(dim, n, seed + static_cast<std::uint64_t>(c));
    const double obj = trace_objective_value(green, m);
    if (obj > rep.best_random_objective) {
      rep.best_random_objective = obj;
      best_m = m;
    }
  }
  rep.clause_a =
      std::abs(rep.optimum_objective - rep.singular_sum) <= tol * prior &&
      rep.best_random_objective <= rep.optimum_objective + tol * prior;

  // (b) weighted n-width.
  const SVDBasis weighted = weighted_svd(green, fx, fy);
  const double scale = weighted.lambdas[0];
  rep.optimum_width = nwidth_eval(green, fx, fy, weighted.v_hat.leftCols(n));
  rep.lambda_next = n < dim ? weighted.lambdas[n] : 0.0;
  rep.best_random_width = -1.0;
  for (Index c = 0; c < candidates; ++c) {
    const DenseMatrix v =
        gaussian_matrix(dim, n, seed + 0x5bd1e995ULL + static_cast<std::uint64_t>(c));
    const double w = nwidth_eval(green, fx, fy, v);
    if (rep.best_random_width < 0.0 || w < rep.best_random_width)
      rep.best_random_width = w;
  }
  rep.clause_b = std::abs(rep.optimum_width - rep.lambda_next) <= tol * scale &&
                 rep.best_random_width >= rep.optimum_width - tol * scale;

  // (c) from the best random M toward Û_n. Along the way the trailing mass
  // sum_{j>n} a_j of span(Λ Ûᵀ M) is bounded by gap / (λ_n^2 - λ_{n+1}^2).
  if (best_m.size() == 0) {
    rep.clause_c = false;
    return rep;
  }
  const DenseMatrix start = qr_thin(best_m).q;
  const double lam_n2 = plain.lambdas[n - 1] * plain.lambdas[n - 1];
  const double lam_next2 = n < dim ? plain.lambdas[n] * plain.lambdas[n] : 0.0;
  const double split = lam_n2 - lam_next2;
  bool ok = true;
  for (double t : {0.0, 0.5, 0.9, 0.99, 0.999, 1.0}) {
    const DenseMatrix m = (1.0 - t) * start + t * u_n;
    const double gap = rep.singular_sum - trace_objective_value(green, m);
    const double angle = max_angle(m, u_n);
    if (!rep.path_gap.empty()) {
      ok = ok && gap <= rep.path_gap.back() + tol * prior;
      ok = ok && angle <= rep.path_angle.back() + 1e-12;
    }
    if (split > 0.0 && n < dim) {
      const DenseMatrix y = plain.lambdas.asDiagonal() * (plain.u_hat.transpose() * m);
      const DenseMatrix qy = qr_thin(y).q;
      const double trailing = qy.bottomRows(dim - n).squaredNorm();
      ok = ok && trailing <= std::max(gap, 0.0) / split + tol * prior / split;
    }
    rep.path_gap.push_back(gap);
    rep.path_angle.push_back(angle);
  }
  ok = ok && std::abs(rep.path_gap.back()) <= tol * prior &&
       rep.path_angle.back() <= 1e-8;
  rep.clause_c = ok;
  return rep;
}

} // namespace optbasis
