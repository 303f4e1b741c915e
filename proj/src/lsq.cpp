#include "dpgstar/lsq.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dpgstar/errors.hpp"
#include "dpgstar/linalg.hpp"
#include "dpgstar/solver.hpp"

namespace dpg {

MatrixXc LsqSystem::saddle_matrix() const {
  const Index n = test_dim(), k = constraint_dim();
  MatrixXc m = MatrixXc::Zero(n + k, n + k);
  m.topLeftCorner(n, n) = gram0;
  m.topRightCorner(n, k) = constraint;
  m.bottomLeftCorner(k, n) = constraint.adjoint();
  return m;
}

LsqSystem assemble_lsq(const AcousticsConfig &cfg, const StructuredMesh &mesh, bool manufactured) {
  cfg.validate();
  const TrialDofLayout trial(mesh, cfg.p);
  const TestDofLayout test(mesh, cfg.p, cfg.dp);
  const Index first_trace = trial.num_fields();
  const Index ntrace = trial.size() - first_trace;

  LsqSystem ls;
  ls.gram0 = MatrixXc::Zero(test.size(), test.size());
  ls.constraint = MatrixXc::Zero(test.size(), ntrace);
  ls.rhs_top = VectorXc::Zero(test.size());
  for (Index k = 0; k < ntrace; ++k) ls.trace_dofs.push_back(first_trace + k);

  const QuadratureRule wave = wave_rule(cfg, mesh);
  const PlaneWave plane(cfg);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ElementContribution c = assemble_element(cfg, mesh, e, trial, test);
    const Index off = c.test_offset, nt = c.gram.rows();
    ls.gram0.block(off, off, nt, nt) = assemble_element_gram(cfg, mesh, e, TestNorm::pure_graph());
    for (std::size_t k = 0; k < c.trial_global.size(); ++k) {
      const Index g = c.trial_global[k];
      if (g >= first_trace) ls.constraint.block(off, g - first_trace, nt, 1) += c.b_block.col(Index(k));
    }
    if (manufactured) {
      const Element &el = mesh.element(e);
      const MatrixXc av = graph_rows(cfg.omega, sample_test_basis(cfg, el, wave));
      const MatrixXc ag = graph_rows(cfg.omega, sample_test_wave(plane, el, wave));
      const VectorXd w = volume_weights(el, wave);
      const Index np = w.size();
      for (Index b = 0; b < 3; ++b)
        ls.rhs_top.segment(off, nt) +=
            av.middleRows(b * np, np).adjoint() * (w.asDiagonal() * ag.middleRows(b * np, np)).col(0);
    }
  }

  if (manufactured) {
    const VectorXc g = assemble_load_adjoint(cfg, mesh, trial, Goal::manufactured);
    ls.rhs_constraint = g.tail(ntrace);
  } else {
    ls.rhs_constraint = VectorXc::Zero(ntrace);
  }
  return ls;
}

LsqSolution solve_lsq(const LsqSystem &ls) {
  const Index n = ls.test_dim(), k = ls.constraint_dim();
  VectorXc rhs(n + k);
  rhs << ls.rhs_top, ls.rhs_constraint;

  LsqSolution sol;
  if (max_abs(rhs) == 0.0) {
    sol.psi = VectorXc::Zero(n);
    sol.multiplier = VectorXc::Zero(k);
    return sol;
  }
  const MatrixXc m = ls.saddle_matrix();
  Eigen::PartialPivLU<MatrixXc> lu(m);
  if (!(lu.rcond() > 1e-15)) throw FactorizationError("least-squares saddle system", -1);

  const VectorXc x = lu.solve(rhs);
  sol.psi = x.head(n);
  sol.multiplier = x.tail(k);
  sol.constraint_residual = max_abs(ls.constraint.adjoint() * sol.psi - ls.rhs_constraint);
  sol.constraint_scale = std::max(max_abs(ls.constraint) * max_abs(sol.psi), max_abs(ls.rhs_constraint));
  return sol;
}

Inertia saddle_inertia(const LsqSystem &ls) {
  const MatrixXc m = ls.saddle_matrix();
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(m, Eigen::EigenvaluesOnly);
  const VectorXd &ev = eig.eigenvalues();
  const double tol = 1e-13 * ev.cwiseAbs().maxCoeff();
  Inertia in;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > tol) ++in.positive;
    else if (ev(i) < -tol) ++in.negative;
    else ++in.zero;
  }
  return in;
}

MatrixXc test_l2_gram(const AcousticsConfig &cfg, const StructuredMesh &mesh) {
  const TestDofLayout test(mesh, cfg.p, cfg.dp);
  const QuadratureRule rule = gauss_rule(cfg.poly_points());
  MatrixXc m = MatrixXc::Zero(test.size(), test.size());
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const Element &el = mesh.element(e);
    const Index nt = test.per_element();
    m.block(test.offset(e), test.offset(e), nt, nt) = element_l2_gram(sample_test_basis(cfg, el, rule), el, rule);
  }
  return m;
}

std::vector<AlphaRow> alpha_sweep(const AcousticsConfig &cfg, const StructuredMesh &mesh,
                                  const std::vector<double> &alphas) {
  if (alphas.empty()) throw ValidationError("alpha sweep: no alpha values");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw ValidationError("alpha sweep: alphas must be positive");
    if (i > 0 && !(alphas[i] < alphas[i - 1])) throw ValidationError("alpha sweep: alphas must be descending");
  }

  const TestDofLayout test(mesh, cfg.p, cfg.dp);
  const LsqSolution lsq = solve_lsq(assemble_lsq(cfg, mesh, true));
  const double lsq_err = test_space_l2_error(cfg, mesh, test, lsq.psi).l2_rel_pct;
  const MatrixXc mass = test_l2_gram(cfg, mesh);

  std::vector<AlphaRow> rows;
  for (double alpha : alphas) {
    AcousticsConfig c = cfg;
    c.norm = TestNorm::scaled_graph(alpha);
    RunOptions opts;
    opts.estimate_condition = false;
    const SolutionBundle b = run(c, mesh, Method::dpgstar, opts);
    const VectorXc diff = gather_psi(b) - lsq.psi;
    rows.push_back({alpha, weighted_norm(mass, diff), field_l2_error(b).l2_rel_pct, lsq_err});
  }
  return rows;
}

} // namespace dpg
