#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "optbasis/config.hpp"
#include "optbasis/grid.hpp"
#include "optbasis/nonlinear.hpp"
#include "optbasis/rsvd.hpp"
#include "optbasis/sobolev.hpp"

namespace optbasis {

/// Everything a run needs, assembled from a config.
struct Problem {
  ProblemTag tag = ProblemTag::Custom;
  SparseOperator op;
  Vector f;
  NonlinearTerm term;
  WeightFactor fx;
  WeightFactor fy;
  std::optional<Grid2D> grid;      ///< 2D problems
  std::optional<PhaseGrid> phase;  ///< transport problems

  Index size() const { return op.rows(); }
};

Problem build_problem(const ExperimentConfig &cfg);

RsvdParams rsvd_params(const ExperimentConfig &cfg);

/// u_n = sum_{i<=n} lambda_i <f, v_i>_X u_i. Throws RankExhausted if
/// n > basis.rank().
Vector solve_linear_projection(const SVDBasis &basis, const WeightFactor &fx,
                               const Vector &f, Index n);

struct ErrorCurve {
  std::vector<Index> n;
  std::vector<double> rel_l2;
  std::vector<double> rel_energy; ///< empty unless requested
  bool has_energy() const { return !rel_energy.empty(); }
};

/// Relative errors of the n-term reconstruction against u_ref for each n in
/// n_list (strictly increasing). With a grid the energy error is added. With
/// a nonzero term the reconstruction is the fixed point, otherwise the
/// linear projection.
ErrorCurve error_curve(const Vector &u_ref, const SVDBasis &basis,
                       const WeightFactor &fx, const Vector &f,
                       std::span<const Index> n_list,
                       const Grid2D *energy_grid = nullptr,
                       const NonlinearTerm *term = nullptr,
                       const FixedPointOptions &opts = {});

/// step, 2 step, ... up to nmax, clipped at limit.
std::vector<Index> n_schedule(Index nmax, Index step, Index limit);

/// Header `n,rel_l2` or `n,rel_l2,rel_energy`.
void write_error_csv(const std::filesystem::path &path, const ErrorCurve &curve);
/// Header `i,lambda_rel`, i from 1, lambda_i / lambda_1.
void write_decay_csv(const std::filesystem::path &path, const Vector &lambdas);

/// Basis of the configured problem via the randomized finder.
SVDBasis build_basis(const ExperimentConfig &cfg, const Problem &prob);

/// Runs sv-decay for each eps (eps for elliptic problems, eps2 for transport)
/// and writes `<dir>/sv_decay_<k>.csv` for the k-th value. Returns the paths.
std::vector<std::filesystem::path> sweep(const ExperimentConfig &cfg,
                                         std::span<const double> eps_values,
                                         const std::filesystem::path &dir);

} // namespace optbasis
