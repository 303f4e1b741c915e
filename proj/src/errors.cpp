#include "dpgstar/errors.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "dpgstar/lsq.hpp"

namespace dpg {

namespace {

VectorXc element_slice(const VectorXc &global, const std::vector<Index> &map) {
  VectorXc out(Index(map.size()));
  for (std::size_t k = 0; k < map.size(); ++k) out(Index(k)) = global(map[k]);
  return out;
}

ElementEvaluator test_space_evaluator(const AcousticsConfig &cfg, const StructuredMesh &mesh,
                                      const std::function<VectorXc(Index)> &coefficients) {
  return [&cfg, &mesh, coefficients](Index e, const QuadratureRule &rule) -> MatrixXc {
    const TestSample s = sample_test_basis(cfg, mesh.element(e), rule);
    return s.volume.topRows(3 * s.points) * coefficients(e);
  };
}

double percent(double num, double den) { return den > 0.0 ? 100.0 * num / den : 0.0; }

} // namespace

ErrorReport l2_error(const AcousticsConfig &cfg, const StructuredMesh &mesh, const ElementEvaluator &discrete) {
  const QuadratureRule rule = wave_rule(cfg, mesh);
  const PlaneWave wave(cfg);
  std::array<double, 3> err{}, ref{};
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const Element &el = mesh.element(e);
    const VectorXd w = volume_weights(el, rule);
    const auto pts = volume_points(el, rule);
    const MatrixXc values = discrete(e, rule);
    const Index np = w.size();
    for (Index r = 0; r < np; ++r) {
      const Point &x = pts[std::size_t(r)];
      const auto u = wave.velocity(x);
      const std::array<Complex, 3> exact = {wave.pressure(x), u.x(), u.y()};
      for (std::size_t c = 0; c < 3; ++c) {
        err[c] += w(r) * std::norm(exact[c] - values(Index(c) * np + r, 0));
        ref[c] += w(r) * std::norm(exact[c]);
      }
    }
  }
  ErrorReport out;
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    out.abs_error[c] = std::sqrt(err[c]);
    out.exact_norm[c] = std::sqrt(ref[c]);
    num += err[c];
    den += ref[c];
  }
  out.denominator = std::sqrt(den);
  out.l2_rel_pct = percent(std::sqrt(num), out.denominator);
  return out;
}

ErrorReport field_l2_error(const SolutionBundle &b) {
  const StructuredMesh &mesh = *b.mesh;
  if (b.method == Method::dpg) {
    const TrialDofLayout &trial = *b.trial;
    const VectorXc &u = b.u;
    return l2_error(b.cfg, mesh, [&](Index e, const QuadratureRule &rule) -> MatrixXc {
      const TrialSample s = sample_trial_basis(mesh, trial, e, rule);
      return s.volume * element_slice(u, trial.element_map(e).global);
    });
  }
  ErrorReport out = l2_error(b.cfg, mesh, test_space_evaluator(b.cfg, mesh, [&](Index e) { return b.psi[std::size_t(e)]; }));
  out.graph_rel_pct = graph_norm_error(b);
  return out;
}

ErrorReport test_space_l2_error(const AcousticsConfig &cfg, const StructuredMesh &mesh, const TestDofLayout &test,
                                const VectorXc &psi) {
  return l2_error(cfg, mesh, test_space_evaluator(cfg, mesh, [&](Index e) -> VectorXc {
    return psi.segment(test.offset(e), test.per_element());
  }));
}

double graph_norm_error(const AcousticsConfig &cfg, const StructuredMesh &mesh, const TestDofLayout &test,
                        const VectorXc &psi) {
  const QuadratureRule rule = wave_rule(cfg, mesh);
  const PlaneWave wave(cfg);
  double num = 0.0, den = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const Element &el = mesh.element(e);
    const VectorXd w = volume_weights(el, rule);
    const TestSample exact = sample_test_wave(wave, el, rule);
    TestSample diff = exact;
    diff.volume -= sample_test_basis(cfg, el, rule).volume * psi.segment(test.offset(e), test.per_element());

    auto squared = [&](const TestSample &s) {
      const MatrixXc av = graph_rows(cfg.omega, s);
      const MatrixXc v = s.volume.topRows(3 * s.points);
      double acc = 0.0;
      for (Index b = 0; b < 3; ++b)
        for (Index r = 0; r < s.points; ++r)
          acc += w(r) * (std::norm(av(b * s.points + r, 0)) + std::norm(v(b * s.points + r, 0)));
      return acc;
    };
    num += squared(diff);
    den += squared(exact);
  }
  return percent(std::sqrt(num), std::sqrt(den));
}

double graph_norm_error(const SolutionBundle &b) {
  if (b.method != Method::dpgstar) throw ValidationError("graph norm error is defined for dpgstar runs");
  return graph_norm_error(b.cfg, *b.mesh, *b.test, gather_psi(b));
}

Rates convergence_rates(const std::vector<RatePoint> &series) {
  if (series.size() < 2) throw ValidationError("convergence rates need at least two points");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i].error > 0.0) || !(series[i].h > 0.0))
      throw ValidationError("convergence rates need positive h and errors");
    if (i > 0 && !(series[i].h < series[i - 1].h)) throw ValidationError("convergence rates: h must decrease");
  }
  Rates r;
  const bool with_dofs = std::all_of(series.begin(), series.end(), [](const RatePoint &p) { return p.ndof > 0.0; });
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double le = std::log(series[i].error / series[i + 1].error);
    r.h_rates.push_back(le / std::log(series[i].h / series[i + 1].h));
    if (with_dofs) r.dof_rates.push_back(le / std::log(series[i + 1].ndof / series[i].ndof));
  }
  auto slope = [&](auto abscissa) {
    const double n = double(series.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto &p : series) {
      const double x = abscissa(p), y = std::log(p.error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  r.h_slope = slope([](const RatePoint &p) { return std::log(p.h); });
  if (with_dofs) r.dof_slope = -slope([](const RatePoint &p) { return std::log(p.ndof); });
  return r;
}

GoalCheck goal_orthogonality_check(const SolutionBundle &primal, const SolutionBundle &dual) {
  if (primal.method != Method::dpg || dual.method != Method::dpgstar)
    throw ValidationError("goal check needs a dpg primal run and a dpgstar dual run");
  const auto &a = primal.cfg, &c = dual.cfg;
  if (a.p != c.p || a.dp != c.dp || a.omega != c.omega || a.angle_deg != c.angle_deg || a.norm.kind != c.norm.kind ||
      a.norm.alpha != c.norm.alpha || a.quad_extra != c.quad_extra || !(*primal.mesh == *dual.mesh))
    throw ValidationError("goal check: primal and dual runs use different configurations");

  GoalCheck out;
  Complex galerkin = 0.0, inner = 0.0;
  double psi_sq = 0.0, phi_sq = 0.0;
  const auto &elements = primal.system->elements;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const ElementCache &e = elements[k];
    const VectorXc &psi = primal.psi[k];
    const VectorXc &phi = dual.psi[k];
    const VectorXc exact = element_form_exact(primal.cfg, *primal.mesh, Index(k));
    const VectorXc discrete = e.b_block * element_slice(primal.u, e.trial_global);
    galerkin += phi.dot(exact - discrete);
    out.galerkin_scale += phi.norm() * (exact.norm() + discrete.norm());
    inner += phi.dot(e.gram_matrix * psi);
    psi_sq += std::real(psi.dot(e.gram_matrix * psi));
    phi_sq += std::real(phi.dot(e.gram_matrix * phi));
  }
  out.galerkin = std::abs(galerkin);
  out.v_inner = std::abs(inner);
  out.v_inner_scale = std::sqrt(psi_sq * phi_sq);
  return out;
}

MatrixXc conforming_basis(const MatrixXc &constraint) {
  Eigen::ColPivHouseholderQR<MatrixXc> qr(constraint);
  const Index n = constraint.rows(), rank = qr.rank();
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(n, n);
  return q.rightCols(n - rank);
}

AlphaH estimate_alpha_h(const AcousticsConfig &cfg, const StructuredMesh &mesh) {
  const LsqSystem ls = assemble_lsq(cfg, mesh, false);
  const MatrixXc z = conforming_basis(ls.constraint);
  if (z.cols() == 0) throw PreconditionError("alpha_h: no weakly conforming test functions (empty kernel)");
  const MatrixXc mass = test_l2_gram(cfg, mesh);
  MatrixXc a = z.adjoint() * ls.gram0 * z;
  MatrixXc m = z.adjoint() * mass * z;
  a = 0.5 * (a + a.adjoint()).eval();
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXc> eig(a, m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw FactorizationError("alpha_h generalized eigensolve", -1);
  return {std::sqrt(std::max(eig.eigenvalues()(0), 0.0)), z.cols()};
}

} // namespace dpg
