#pragma once

#include <vector>

#include "optbasis/grid.hpp"
#include "optbasis/linalg.hpp"
#include "optbasis/rsvd.hpp"
#include "optbasis/sobolev.hpp"

namespace optbasis {

/// Pointwise nonlinearity N(u) of a semilinear problem L u + N(u) = f.
class NonlinearTerm {
public:
  enum class Kind { Zero, Cubic, TwoPhoton };

  static NonlinearTerm zero();
  /// N(u)[k] = u[k]^3.
  static NonlinearTerm cubic();
  /// N(u)[(node, l)] = sigma_b(node) <u>(node) u[(node, l)],
  /// <u> = (1/N_v) sum_l u[(node, l)].
  static NonlinearTerm two_photon(const PhaseGrid &pg, double eps1);

  Kind kind() const noexcept { return kind_; }
  Vector evaluate(const Vector &u) const;
  /// dN/du at u.
  SparseOperator jacobian(const Vector &u) const;

private:
  Kind kind_ = Kind::Zero;
  Index n_v_ = 1;
  Vector sigma_b_; // per spatial node
};

struct Projection {
  Vector pg;    ///< P_n g
  Vector pperp; ///< g - P_n g
};

/// P_n g = sum_{i<=n} <g, v_i>_X v_i. Throws RankExhausted if n > basis.rank().
Projection project_Pn(const SVDBasis &basis, const WeightFactor &fx,
                      const Vector &g, Index n);

struct FixedPointOptions {
  double tol = 1e-12;
  Index max_iter = 500;
  double relax = 1.0; ///< omega in (0, 1]
};

struct FixedPointResult {
  Vector coefficients; ///< c, n entries
  Vector solution;     ///< u_n = sum_i lambda_i c_i u_i
  Index iterations = 0;
  bool converged = false;
  double step = 0.0; ///< sum_i lambda_i^2 |c_i^{k+1} - c_i^k|^2 of the last update
  std::vector<double> history; ///< step per iteration
};

/// Coefficient iteration
///   c^{k+1} = (1 - omega) c^k + omega <f - N(sum_j lambda_j c^k_j u_j), v_i>_X
/// from c^0 = <f, v_i>_X. Stops once the step drops below tol or after
/// max_iter updates. Throws Diverged if |c| exceeds 1e12 or goes non-finite.
FixedPointResult fixed_point_solve(const SVDBasis &basis, const WeightFactor &fx,
                                   const Vector &f, const NonlinearTerm &term,
                                   Index n, const FixedPointOptions &opts = {});

struct ErrorIndicators {
  double e1 = 0.0; ///< |P_n^perp (f - N(u_candidate))|_X
  double e2 = 0.0; ///< |P_n^perp (f - N(u_n))|_X at the fixed point
};

ErrorIndicators error_indicators(const SVDBasis &basis, const WeightFactor &fx,
                                 const Vector &f, const NonlinearTerm &term,
                                 const Vector &u_candidate,
                                 const FixedPointResult &fixed_point, Index n);

/// Runs fixed_point_solve with default options for E2.
ErrorIndicators error_indicators(const SVDBasis &basis, const WeightFactor &fx,
                                 const Vector &f, const NonlinearTerm &term,
                                 const Vector &u_candidate, Index n);

struct RepresentationBound {
  double lhs = 0.0; ///< |u_ref - sum_{i<=n} lambda_i c_i u_i|_Y, c = <f - N(u_ref), v_i>_X
  double rhs = 0.0; ///< lambda_{n+1} (|f|_X + |N(u_ref)|_X)
  bool holds = false;
};

/// Throws RankExhausted when n >= basis.rank() (no lambda_{n+1}).
RepresentationBound check_linear_representation_bound(
    const SVDBasis &basis, const WeightFactor &fx, const WeightFactor &fy,
    const Vector &f, const NonlinearTerm &term, const Vector &u_ref, Index n);

struct NewtonResult {
  Vector solution;
  Index iterations = 0;
  bool converged = false;
  double residual = 0.0; ///< |L u + N(u) - f|_2 at exit
};

/// Damped Newton with backtracking on |L u + N(u) - f|_2, started from the
/// linear solution. Converged once the Newton update satisfies
/// |du| <= tol |u|.
NewtonResult newton_reference(const SparseOperator &op, const NonlinearTerm &term,
                              const Vector &f, double tol = 1e-12,
                              Index max_iter = 100);

} // namespace optbasis
