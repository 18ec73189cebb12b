#pragma once

#include <cstdint>
#include <vector>

#include "optbasis/linalg.hpp"
#include "optbasis/rsvd.hpp"
#include "optbasis/sobolev.hpp"

namespace optbasis {

/// Guard for the dense Bayesian oracles, which materialize C = G Gᵀ.
inline constexpr Index kBayesDenseLimit = 2048;

/// Gaussian posterior of u = G xi, xi ~ N(0, I), given Psi = Mᵀ u observed
/// with noise variance delta (identity weights).
struct Posterior {
  Vector mean;
  DenseMatrix covariance;
  DenseMatrix observations; ///< M, N x n
  Vector psi;
  double delta = 0.0;
  DenseMatrix reconstruction; ///< W = Kᵀ Theta^{-1}; set only when delta = 0
};

/// delta > 0: mean = Kᵀ (Theta + delta I)^{-1} Psi,
///            cov  = C - Kᵀ (Theta + delta I)^{-1} K.
/// delta = 0: the noiseless limit with W = Kᵀ Theta^{-1}.
/// K = Mᵀ C, Theta = Mᵀ C M. Throws SingularTheta if Theta is numerically
/// singular at delta = 0.
Posterior posterior(const DenseMatrix &green, const DenseMatrix &m,
                    const Vector &psi, double delta);

struct TraceReport {
  double objective = 0.0;      ///< Tr(Kᵀ Theta^{-1} K)
  double residual_trace = 0.0; ///< Tr(Sigma), as |G - Kᵀ Theta^{-1} Mᵀ G|_F^2
  double prior_trace = 0.0;    ///< Tr(G Gᵀ)
  DenseMatrix k;
  DenseMatrix theta;
};

TraceReport trace_objective(const DenseMatrix &green, const DenseMatrix &m);

/// Cheaper objective only, for randomized searches.
double trace_objective_value(const DenseMatrix &green, const DenseMatrix &m);

struct BoundCheck {
  double error = 0.0; ///< |u - W Psi|_2
  double bound = 0.0; ///< sqrt(Tr Sigma) |f|_2
  bool holds = false;
};

/// Reconstruction error of the noiseless posterior mean against its bound,
/// for u = G f and Psi = Mᵀ u.
BoundCheck check_reconstruction_bound(const DenseMatrix &green,
                                      const DenseMatrix &m, const Vector &f);

/// max_f min_c |G f - G V c|_Y / |f|_X for a fixed candidate V (N x n), the
/// top singular value of (I - P) F_Y G F_X^{-1} with P the projector onto
/// span(F_Y G V). Throws RankDeficient if V is rank deficient.
double nwidth_eval(const DenseMatrix &green, const WeightFactor &fx,
                   const WeightFactor &fy, const DenseMatrix &v);

/// Principal angles (radians, ascending) between span(a) and span(b).
Vector principal_angles(const DenseMatrix &a, const DenseMatrix &b);

struct EquivalenceReport {
  Index n = 0;
  Index candidates = 0;
  // (a) Bayesian side, identity weights.
  double optimum_objective = 0.0; ///< objective at M = Û_n
  double singular_sum = 0.0;      ///< sum_{j<=n} lambda_j^2
  double best_random_objective = 0.0;
  bool clause_a = false;
  // (b) n-width side, given weights.
  double optimum_width = 0.0; ///< nwidth at V̂_n
  double lambda_next = 0.0;   ///< lambda_{n+1}
  double best_random_width = 0.0;
  bool clause_b = false;
  // (c) spans: along the segment from the best random M to Û_n the objective
  // gap and the largest principal angle both decrease to zero.
  std::vector<double> path_gap;
  std::vector<double> path_angle;
  bool clause_c = false;

  bool passed() const noexcept { return clause_a && clause_b && clause_c; }
};

/// Randomized-search verification that the left singular vectors maximize
/// the trace objective, that V̂_n attains the n-width, and that
/// near-optimal observations align with span(Û_n).
EquivalenceReport check_equivalence(const DenseMatrix &green,
                                    const WeightFactor &fx,
                                    const WeightFactor &fy, Index n,
                                    Index candidates = 200,
                                    std::uint64_t seed = 7,
                                    double tol = 1e-9);

} // namespace optbasis
