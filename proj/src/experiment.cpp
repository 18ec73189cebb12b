#include "optbasis/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "optbasis/elliptic.hpp"
#include "optbasis/rte.hpp"

namespace optbasis {

namespace {

using std::numbers::pi;

Vector spatial_sine_on_phase(const PhaseGrid &pg, double amplitude) {
  const Vector s = eval_source_elliptic(pg.space(), amplitude);
  Vector f(pg.size());
  for (Index node = 0; node < pg.space().size(); ++node)
    f.segment(node * pg.angles(), pg.angles()).setConstant(s[node]);
  return f;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path &path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

} // namespace

Problem build_problem(const ExperimentConfig &cfg) {
  validate(cfg);
  Problem prob;
  const std::string &kind = cfg.problem;
  const bool sine = cfg.source == "sine";
  const bool gaussian = cfg.source == "gaussian";
  const bool zero = cfg.source == "zero";

  if (kind == "elliptic" || kind == "semilinear_elliptic") {
    const Grid2D grid(cfg.length, cfg.m_intervals);
    prob.tag = kind == "elliptic" ? ProblemTag::Elliptic : ProblemTag::SemilinearElliptic;
    prob.op = assemble_elliptic(grid, EllipticMedium{cfg.eps});
    if (gaussian)
      throw Error(ErrorKind::ConfigInvalid,
                  "'problem.source.kind': gaussian needs a transport problem");
    prob.f = zero ? Vector::Zero(grid.size()) : eval_source_elliptic(grid, cfg.amplitude);
    prob.term = kind == "elliptic" ? NonlinearTerm::zero() : NonlinearTerm::cubic();
    prob.fx = cfg.weight_x == "identity" ? WeightFactor::scaled_identity(grid.size(), 1.0)
                                         : build_sobolev_weight(cfg.p, grid);
    prob.fy = cfg.weight_y == "identity" ? WeightFactor::scaled_identity(grid.size(), 1.0)
                                         : build_sobolev_weight(0, grid);
    prob.grid = grid;
  } else if (kind == "rte" || kind == "semilinear_rte") {
    const PhaseGrid pg(Grid2D(cfg.length, cfg.m_intervals), cfg.n_v);
    prob.tag = kind == "rte" ? ProblemTag::Rte : ProblemTag::SemilinearRte;
    prob.op = assemble_rte(pg, RteCoefficients{cfg.eps1, cfg.eps2, cfg.g});
    if (zero)
      prob.f = Vector::Zero(pg.size());
    else if (sine)
      prob.f = spatial_sine_on_phase(pg, cfg.amplitude);
    else
      prob.f = eval_source_rte(pg, cfg.amplitude);
    prob.term = kind == "rte" ? NonlinearTerm::zero()
                              : NonlinearTerm::two_photon(pg, cfg.eps1);
    prob.fx = cfg.weight_x == "identity" ? WeightFactor::scaled_identity(pg.size(), 1.0)
                                         : build_rte_weight(cfg.p, pg);
    prob.fy = cfg.weight_y == "identity" ? WeightFactor::scaled_identity(pg.size(), 1.0)
                                         : build_rte_weight(0, pg);
    prob.grid = pg.space();
    prob.phase = pg;
  } else if (kind == "identity") {
    const Index n = cfg.unknowns();
    prob.tag = ProblemTag::Identity;
    SparseOperator id(n, n);
    id.setIdentity();
    prob.op = id;
    prob.f = zero ? Vector::Zero(n) : Vector::Constant(n, cfg.amplitude);
    prob.fx = WeightFactor::scaled_identity(n, 1.0);
    prob.fy = WeightFactor::scaled_identity(n, 1.0);
  } else { // elliptic_1d
    const Index m = cfg.m_intervals;
    const double h = cfg.length / static_cast<double>(m);
    const double eps = cfg.eps;
    prob.tag = ProblemTag::Elliptic1D;
    prob.op = assemble_elliptic_1d(cfg.length, m, [eps](double x) { return kappa(x, x, eps); });
    prob.f = Vector::Zero(m - 1);
    if (!zero)
      for (Index i = 0; i < m - 1; ++i)
        prob.f[i] = cfg.amplitude * std::sin(4.0 * pi * h * static_cast<double>(i + 1));
    prob.fx = cfg.weight_x == "identity" ? WeightFactor::scaled_identity(m - 1, 1.0)
                                         : build_sobolev_weight_1d(cfg.p, m, h);
    prob.fy = cfg.weight_y == "identity" ? WeightFactor::scaled_identity(m - 1, 1.0)
                                         : build_sobolev_weight_1d(0, m, h);
  }
  return prob;
}

RsvdParams rsvd_params(const ExperimentConfig &cfg) {
  RsvdParams p;
  p.rank = cfg.rank;
  p.oversample = cfg.oversample;
  p.power = cfg.power;
  p.seed = cfg.seed;
  return p;
}

Vector solve_linear_projection(const SVDBasis &basis, const WeightFactor &fx,
                               const Vector &f, Index n) {
  const BasisProjector proj(basis, fx, n);
  return proj.synthesize(proj.coefficients(f));
}

ErrorCurve error_curve(const Vector &u_ref, const SVDBasis &basis,
                       const WeightFactor &fx, const Vector &f,
                       std::span<const Index> n_list, const Grid2D *energy_grid,
                       const NonlinearTerm *term, const FixedPointOptions &opts) {
  const bool nonlinear = term != nullptr && term->kind() != NonlinearTerm::Kind::Zero;
  const double ref_l2 = u_ref.norm();
  const double ref_energy = energy_grid ? energy_norm(u_ref, *energy_grid) : 0.0;
  ErrorCurve curve;
  Index prev = -1;
  for (Index n : n_list) {
    if (n <= prev)
      throw Error(ErrorKind::ConfigInvalid, "basis counts must be strictly increasing");
    prev = n;
    const Vector un = nonlinear ? fixed_point_solve(basis, fx, f, *term, n, opts).solution
                                : solve_linear_projection(basis, fx, f, n);
    const Vector diff = u_ref - un;
    curve.n.push_back(n);
    curve.rel_l2.push_back(ref_l2 > 0.0 ? diff.norm() / ref_l2 : diff.norm());
    if (energy_grid) {
      const double e = energy_norm(diff, *energy_grid);
      curve.rel_energy.push_back(ref_energy > 0.0 ? e / ref_energy : e);
    }
  }
  return curve;
}

std::vector<Index> n_schedule(Index nmax, Index step, Index limit) {
  std::vector<Index> out;
  const Index top = std::min(nmax, limit);
  for (Index n = step; n <= top; n += step)
    out.push_back(n);
  if (!out.empty() && out.back() != top && top > 0)
    out.push_back(top);
  return out;
}

void write_error_csv(const std::filesystem::path &path, const ErrorCurve &curve) {
  std::ofstream out = open_csv(path);
  out << (curve.has_energy() ? "n,rel_l2,rel_energy\n" : "n,rel_l2\n");
  for (std::size_t k = 0; k < curve.n.size(); ++k) {
    out << curve.n[k] << ',' << format_double(curve.rel_l2[k]);
    if (curve.has_energy())
      out << ',' << format_double(curve.rel_energy[k]);
    out << '\n';
  }
  if (!out)
    throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_decay_csv(const std::filesystem::path &path, const Vector &lambdas) {
  if (lambdas.size() == 0 || !(lambdas[0] > 0.0))
    throw Error(ErrorKind::RankDeficient, "no positive singular values to report");
  std::ofstream out = open_csv(path);
  out << "i,lambda_rel\n";
  for (Index i = 0; i < lambdas.size(); ++i)
    out << (i + 1) << ',' << format_double(lambdas[i] / lambdas[0]) << '\n';
  if (!out)
    throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

SVDBasis build_basis(const ExperimentConfig &cfg, const Problem &prob) {
  const FactorizedSolver fs(prob.op);
  SVDBasis b = compute_basis(fs, prob.fx, prob.fy, rsvd_params(cfg));
  b.meta.tag = prob.tag;
  b.meta.sobolev_order = cfg.weight_x == "sobolev" ? cfg.p : 0;
  return b;
}

std::vector<std::filesystem::path> sweep(const ExperimentConfig &cfg,
                                         std::span<const double> eps_values,
                                         const std::filesystem::path &dir) {
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < eps_values.size(); ++k) {
    ExperimentConfig c = cfg;
    if (c.is_rte())
      c.eps2 = eps_values[k];
    else
      c.eps = eps_values[k];
    const Problem prob = build_problem(c);
    const SVDBasis basis = build_basis(c, prob);
    const auto path = dir / ("sv_decay_" + std::to_string(k) + ".csv");
    write_decay_csv(path, basis.lambdas);
    paths.push_back(path);
  }
  return paths;
}

} // namespace optbasis
