#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optbasis/bayes.hpp"
#include "optbasis/config.hpp"
#include "optbasis/experiment.hpp"
#include "optbasis/obf.hpp"

namespace fs = std::filesystem;
using namespace optbasis;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  Index rank = 0, oversample = 0, power = 0, nmax = 0, max_iter = 0;
  std::uint64_t seed = 0;
  double tol = 0.0, relax = 0.0;
  bool paper_scale = false;
  std::vector<double> eps_list{1.0, 0.25, 0.0625};
};

ExperimentConfig resolve(const Overrides &o, const CLI::App &app) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (app.count("--rank")) cfg.rank = o.rank;
  if (app.count("--oversample")) cfg.oversample = o.oversample;
  if (app.count("--power")) cfg.power = o.power;
  if (app.count("--seed")) cfg.seed = o.seed;
  if (app.count("--nmax")) cfg.nmax = o.nmax;
  if (app.count("--tol")) cfg.tol = o.tol;
  if (app.count("--max-iter")) cfg.max_iter = o.max_iter;
  if (app.count("--relax")) cfg.relax = o.relax;
  if (o.paper_scale) {
    cfg.m_intervals = 64;
    cfg.n_v = 40;
  }
  validate(cfg);
  return cfg;
}

fs::path output_path(const Overrides &o, const ExperimentConfig &cfg,
                     const std::string &fallback) {
  if (!o.out.empty())
    return o.out;
  return fs::path(cfg.out_dir) / fallback;
}

void line(const std::string &key, double v) { std::printf("%s: %.6e\n", key.c_str(), v); }
void line(const std::string &key, Index v) { std::printf("%s: %ld\n", key.c_str(), static_cast<long>(v)); }
void line(const std::string &key, const std::string &v) {
  std::printf("%s: %s\n", key.c_str(), v.c_str());
}
bool check(const std::string &what, bool ok) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  return ok;
}

Vector direct_solution(const Problem &prob) { return FactorizedSolver(prob.op).solve(prob.f); }

int cmd_assemble_check(const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  const SparseOperator &op = prob.op;
  line("problem", cfg.problem);
  line("N", prob.size());
  line("nnz", static_cast<Index>(op.nonZeros()));
  bool ok = true;
  const FactorizedSolver fs(op);
  line("min_pivot", fs.min_abs_pivot());

  bool diag_pos = true, offdiag_nonpos = true, dominant = true;
  for (Index j = 0; j < op.outerSize(); ++j)
    for (SparseOperator::InnerIterator it(op, j); it; ++it) {
      if (it.row() == it.col())
        diag_pos = diag_pos && it.value() > 0.0;
      else
        offdiag_nonpos = offdiag_nonpos && it.value() <= 0.0;
    }
  const Vector row_sums = op * Vector::Ones(op.cols());
  dominant = row_sums.minCoeff() >= -1e-12 * max_abs_entry(op);
  ok &= check("positive diagonal", diag_pos);
  ok &= check("nonpositive off-diagonal", offdiag_nonpos);
  ok &= check("weak row diagonal dominance", dominant);
  if (prob.tag == ProblemTag::Elliptic || prob.tag == ProblemTag::SemilinearElliptic ||
      prob.tag == ProblemTag::Elliptic1D) {
    const double asym = SparseOperator(op - SparseOperator(op.transpose())).norm();
    ok &= check("symmetric", asym == 0.0);
  }
  const Vector u = fs.solve(prob.f);
  if (prob.f.minCoeff() >= 0.0)
    ok &= check("nonnegative source gives nonnegative solution",
                u.minCoeff() >= -1e-12 * u.cwiseAbs().maxCoeff());
  const Vector z = fs.solve(Vector::Zero(prob.size()));
  ok &= check("zero source gives zero solution", z.cwiseAbs().maxCoeff() == 0.0);
  ok &= check("weights positive definite",
              prob.fx.norm(Vector::Ones(prob.size())) > 0.0 &&
                  prob.fy.norm(Vector::Ones(prob.size())) > 0.0);
  return ok ? 0 : 1;
}

int cmd_basis(const Overrides &o, const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  const SVDBasis basis = build_basis(cfg, prob);
  const fs::path path = output_path(o, cfg, cfg.basis_file);
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  write_obf(path, basis);
  write_sidecar(path, cfg, basis);
  line("basis", path.string());
  line("rank", basis.rank());
  line("lambda_1", basis.lambdas[0]);
  line("lambda_r", basis.lambdas[basis.rank() - 1]);
  if (basis.rank_deficient())
    std::printf("warning: only %ld of %ld triplets above the noise floor\n",
                static_cast<long>(basis.rank()), static_cast<long>(cfg.rank));
  return 0;
}

int cmd_sv_decay(const Overrides &o, const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  const SVDBasis basis = build_basis(cfg, prob);
  const fs::path path = output_path(o, cfg, "sv_decay.csv");
  write_decay_csv(path, basis.lambdas);
  line("csv", path.string());
  line("rank", basis.rank());
  return 0;
}

int cmd_solve_linear(const Overrides &o, const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  if (cfg.is_semilinear())
    throw Error(ErrorKind::ConfigInvalid, "'problem.kind': solve-linear needs a linear problem");
  const SVDBasis basis = build_basis(cfg, prob);
  const Vector u_ref = direct_solution(prob);
  const auto ns = n_schedule(cfg.nmax, cfg.n_step, basis.rank());
  const Grid2D *energy = prob.grid && !prob.phase ? &*prob.grid : nullptr;
  const ErrorCurve curve = error_curve(u_ref, basis, prob.fx, prob.f, ns, energy);
  const fs::path path = output_path(o, cfg, "error_linear.csv");
  write_error_csv(path, curve);
  line("csv", path.string());
  if (!curve.n.empty()) {
    line("n", curve.n.back());
    line("rel_l2", curve.rel_l2.back());
  }
  return 0;
}

int cmd_solve_nonlinear(const Overrides &o, const ExperimentConfig &cfg) {
  if (!cfg.is_semilinear())
    throw Error(ErrorKind::ConfigInvalid,
                "'problem.kind': solve-nonlinear needs a semilinear problem");
  const Problem prob = build_problem(cfg);
  const SVDBasis basis = build_basis(cfg, prob);
  const NewtonResult ref = newton_reference(prob.op, prob.term, prob.f);
  line("newton_iterations", ref.iterations);
  line("newton_residual", ref.residual);
  const FixedPointOptions opts{cfg.tol, cfg.max_iter, cfg.relax};
  const auto ns = n_schedule(cfg.nmax, cfg.n_step, basis.rank());
  const Grid2D *energy = prob.grid && !prob.phase ? &*prob.grid : nullptr;
  const ErrorCurve curve =
      error_curve(ref.solution, basis, prob.fx, prob.f, ns, energy, &prob.term, opts);
  const fs::path path = output_path(o, cfg, "error_nonlinear.csv");
  write_error_csv(path, curve);
  line("csv", path.string());
  if (curve.n.empty())
    return 0;
  const Index n = curve.n.back();
  const FixedPointResult fp = fixed_point_solve(basis, prob.fx, prob.f, prob.term, n, opts);
  const ErrorIndicators e =
      error_indicators(basis, prob.fx, prob.f, prob.term, ref.solution, fp, n);
  line("n", n);
  line("rel_l2", curve.rel_l2.back());
  line("iterations", fp.iterations);
  line("converged", std::string(fp.converged ? "yes" : "no"));
  line("E1", e.e1);
  line("E2", e.e2);
  return ref.converged && fp.converged ? 0 : 1;
}

int cmd_oracle_svd(const Overrides &o, const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  const SVDBasis oracle = dense_svd_oracle(prob.op, prob.fx, prob.fy);
  const SVDBasis basis = build_basis(cfg, prob);
  const fs::path path = output_path(o, cfg, "sv_decay_oracle.csv");
  write_decay_csv(path, oracle.lambdas);
  line("csv", path.string());
  const Index k = std::min<Index>(5, basis.rank());
  double worst = 0.0;
  for (Index i = 0; i < k; ++i)
    worst = std::max(worst, std::abs(basis.lambdas[i] - oracle.lambdas[i]) / oracle.lambdas[i]);
  line("top5_max_rel_error", worst);
  const FactorizedSolver fs(prob.op);
  std::vector<Index> idx(static_cast<std::size_t>(basis.rank()));
  for (Index i = 0; i < basis.rank(); ++i)
    idx[static_cast<std::size_t>(i)] = i;
  bool ok = true;
  ok &= check("weighted orthonormality to 1e-8",
              orthonormality_defect(basis, prob.fx, prob.fy) <= 1e-8);
  ok &= check("G v = lambda u to 1e-8", forward_relation_defect(basis, fs, idx) <= 1e-8);
  return ok ? 0 : 1;
}

DenseMatrix dense_operator_green(const Problem &prob) {
  if (prob.size() > kBayesDenseLimit)
    throw Error(ErrorKind::ProblemTooLarge,
                "check needs N <= " + std::to_string(kBayesDenseLimit));
  return dense_green(FactorizedSolver(prob.op));
}

int cmd_nwidth_check(const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  const DenseMatrix g = dense_operator_green(prob);
  const SVDBasis svd = weighted_svd(g, prob.fx, prob.fy);
  const double scale = svd.lambdas[0];
  bool ok = true;
  const Index top = std::min<Index>(5, prob.size() - 1);
  for (Index n = 1; n <= top; ++n) {
    const double w = nwidth_eval(g, prob.fx, prob.fy, svd.v_hat.leftCols(n));
    const double target = svd.lambdas[n];
    double best = INFINITY;
    for (Index c = 0; c < 100; ++c)
      best = std::min(best, nwidth_eval(g, prob.fx, prob.fy,
                                        gaussian_matrix(prob.size(), n, cfg.seed + 1000 * n + c)));
    const bool attained = std::abs(w - target) <= 1e-9 * scale;
    const bool lower = best >= target - 1e-9 * scale;
    std::printf("n=%ld width(V_n)=%.12e lambda_%ld=%.12e attained=%s random_min=%.6e %s\n",
                static_cast<long>(n), w, static_cast<long>(n + 1), target,
                attained ? "yes" : "no", best, lower ? "ok" : "FAIL");
    ok = ok && attained && lower;
  }
  return ok ? 0 : 1;
}

int cmd_bayes_check(const ExperimentConfig &cfg) {
  const Problem prob = build_problem(cfg);
  const DenseMatrix g = dense_operator_green(prob);
  const Index dim = prob.size();
  bool ok = true;
  const Index top = std::min<Index>(5, dim - 1);
  for (Index n = 1; n <= top; ++n) {
    const EquivalenceReport r = check_equivalence(g, prob.fx, prob.fy, n, 200, cfg.seed + 7);
    std::printf("n=%ld objective=%.12e sum_lambda2=%.12e best_random=%.12e (a)=%s "
                "(b)=%s (c)=%s\n",
                static_cast<long>(n), r.optimum_objective, r.singular_sum,
                r.best_random_objective, r.clause_a ? "ok" : "FAIL",
                r.clause_b ? "ok" : "FAIL", r.clause_c ? "ok" : "FAIL");
    ok = ok && r.passed();
  }
  const Index nobs = std::min<Index>(4, dim);
  Index violations = 0;
  double worst_conservation = 0.0;
  for (Index d = 0; d < 100; ++d) {
    const std::uint64_t s = cfg.seed + 50000 + static_cast<std::uint64_t>(d);
    const DenseMatrix m = gaussian_matrix(dim, nobs, s);
    const Vector f = gaussian_matrix(dim, 1, s + 777777).col(0);
    if (!check_reconstruction_bound(g, m, f).holds)
      ++violations;
    const TraceReport tr = trace_objective(g, m);
    worst_conservation = std::max(
        worst_conservation,
        std::abs(tr.objective + tr.residual_trace - tr.prior_trace) / tr.prior_trace);
  }
  line("bound_violations", violations);
  line("conservation_max_rel", worst_conservation);
  ok = ok && violations == 0 && worst_conservation <= 1e-8;
  return ok ? 0 : 1;
}

int cmd_sweep(const Overrides &o, const ExperimentConfig &cfg) {
  const fs::path dir = o.out.empty() ? fs::path(cfg.out_dir) : fs::path(o.out);
  const auto paths = sweep(cfg, o.eps_list, dir);
  for (const auto &p : paths)
    line("csv", p.string());
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Optimal basis construction and verification for multiscale PDEs"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "experiment JSON");
  app.add_option("--out", o.out, "output file (or directory for sweep)");
  app.add_option("--rank", o.rank, "number of basis functions r");
  app.add_option("--oversample", o.oversample, "rSVD oversampling");
  app.add_option("--power", o.power, "rSVD power iterations q");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--nmax", o.nmax, "largest basis count in error curves");
  app.add_option("--tol", o.tol, "fixed-point tolerance");
  app.add_option("--max-iter", o.max_iter, "fixed-point iteration cap");
  app.add_option("--relax", o.relax, "fixed-point relaxation in (0, 1]");
  app.add_flag("--paper-scale", o.paper_scale, "m = 64, N_v = 40");

  auto *assemble = app.add_subcommand("assemble-check", "assemble and sanity-check the operator");
  auto *basis = app.add_subcommand("basis", "compute and store the optimal basis");
  auto *decay = app.add_subcommand("sv-decay", "write relative singular values");
  auto *linear = app.add_subcommand("solve-linear", "error curve of the linear projection");
  auto *nonlinear = app.add_subcommand("solve-nonlinear", "error curve of the fixed-point solver");
  auto *oracle = app.add_subcommand("oracle-svd", "compare with the dense weighted SVD");
  auto *nwidth = app.add_subcommand("nwidth-check", "verify the n-width identity");
  auto *bayes = app.add_subcommand("bayes-check", "verify the Bayesian equivalences");
  auto *sweep_cmd = app.add_subcommand("sweep", "sv-decay over several media");
  sweep_cmd->add_option("--eps", o.eps_list, "medium scales (default 1 0.25 0.0625)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(o, app);
    if (*assemble) return cmd_assemble_check(cfg);
    if (*basis) return cmd_basis(o, cfg);
    if (*decay) return cmd_sv_decay(o, cfg);
    if (*linear) return cmd_solve_linear(o, cfg);
    if (*nonlinear) return cmd_solve_nonlinear(o, cfg);
    if (*oracle) return cmd_oracle_svd(o, cfg);
    if (*nwidth) return cmd_nwidth_check(cfg);
    if (*bayes) return cmd_bayes_check(cfg);
    if (*sweep_cmd) return cmd_sweep(o, cfg);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
