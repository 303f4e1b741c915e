#include "dpgstar/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dpgstar/mixed_core.hpp"

namespace dpg {

TestNorm parse_norm(const std::string &text) {
  if (text == "graph") return TestNorm::adjoint_graph();
  if (text == "math") return TestNorm::mathematician();
  const std::string prefix = "scaled:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string value = text.substr(prefix.size());
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !(alpha > 0.0) || !std::isfinite(alpha))
      throw ValidationError("--norm: scaled:<alpha> needs a positive number, got '" + value + "'");
    return TestNorm::scaled_graph(alpha);
  }
  throw ValidationError("--norm: expected graph, math or scaled:<alpha>, got '" + text + "'");
}

Method parse_method(const std::string &text) {
  if (text == "dpg") return Method::dpg;
  if (text == "dpgstar") return Method::dpgstar;
  throw ValidationError("--method: expected dpg or dpgstar, got '" + text + "'");
}

Goal parse_goal(const std::string &text) {
  if (text == "manufactured") return Goal::manufactured;
  if (text == "uniform-pressure") return Goal::uniform_pressure;
  throw ValidationError("--goal: expected manufactured or uniform-pressure, got '" + text + "'");
}

std::vector<Table1Row> run_table1(const AcousticsConfig &base, const StructuredMesh &mesh, Index dp_max) {
  if (dp_max < 0) throw ValidationError("--dp-max must be >= 0");
  RunOptions opts;
  opts.estimate_condition = false;
  std::vector<Table1Row> rows;
  for (Index dp = 0; dp <= dp_max; ++dp) {
    AcousticsConfig cfg = base;
    cfg.dp = dp;
    const ErrorReport primal = field_l2_error(run(cfg, mesh, Method::dpg, opts));
    const ErrorReport dual = field_l2_error(run(cfg, mesh, Method::dpgstar, opts));
    rows.push_back({dp, primal.l2_rel_pct, dual.l2_rel_pct, dual.graph_rel_pct});
  }
  return rows;
}

std::vector<HconvRow> run_hconv(const AcousticsConfig &base, const std::vector<Index> &ps,
                                const std::vector<Index> &dps, const std::vector<Index> &nxs, Method method,
                                bool estimate_condition) {
  for (std::size_t i = 1; i < nxs.size(); ++i)
    if (!(nxs[i] > nxs[i - 1])) throw ValidationError("--nx: mesh sizes must increase");
  RunOptions opts;
  opts.estimate_condition = estimate_condition;
  std::vector<HconvRow> rows;
  for (Index p : ps)
    for (Index dp : dps) {
      AcousticsConfig cfg = base;
      cfg.p = p;
      cfg.dp = dp;
      for (std::size_t i = 0; i < nxs.size(); ++i) {
        const StructuredMesh mesh(nxs[i], nxs[i]);
        const SolutionBundle b = run(cfg, mesh, method, opts);
        HconvRow row{p, dp, nxs[i], b.ndof_trial(), field_l2_error(b).l2_rel_pct, std::nullopt, b.condition};
        if (i > 0) {
          const HconvRow &prev = rows.back();
          row.rate_h = std::log(prev.l2_err_pct / row.l2_err_pct) / std::log(double(nxs[i]) / double(nxs[i - 1]));
        }
        rows.push_back(row);
      }
    }
  return rows;
}

bool IdentitySuite::all_pass() const {
  return std::all_of(identities.begin(), identities.end(), [](const auto &i) { return i.pass(); }) &&
         std::all_of(pde_checks.begin(), pde_checks.end(), [](const auto &c) { return c.pass(); });
}

const std::vector<std::string> &identity_names() {
  static const std::vector<std::string> names = {
      "pythagoras",        "dual_norm_identity",       "fundamental_identity",  "stability_bound",
      "aposteriori_bound", "energy_bound",             "aposteriori_energy_bound", "psi_bound",
      "aposteriori_psi_bound", "nested_energy_identity"};
  return names;
}

std::vector<IdentitySummary> run_mixed_core_suite(std::uint64_t seed, Index systems, Index max_dim) {
  if (systems < 1) throw ValidationError("identity suite needs at least one system");
  if (max_dim < 3) throw ValidationError("identity suite needs max dimension >= 3");
  std::mt19937_64 rng(seed);
  std::map<std::string, IdentitySummary> acc;
  for (const auto &name : identity_names()) acc[name].name = name;

  auto record = [&](const IdentityReport &report) {
    for (const auto &r : report.records) {
      IdentitySummary &s = acc.at(r.name);
      s.is_identity = r.is_identity;
      if (s.checks == 0) s.worst_slack = r.is_identity ? 0.0 : r.slack / std::max(std::abs(r.rhs), 1e-300);
      ++s.checks;
      s.worst_relative_defect = std::max(s.worst_relative_defect, r.relative_defect());
      if (r.is_identity) s.worst_gap = std::max(s.worst_gap, r.gap);
      else s.worst_slack = std::min(s.worst_slack, r.slack / std::max(std::abs(r.rhs), 1e-300));
      if (!r.pass()) ++s.failures;
    }
  };

  for (Index k = 0; k < systems; ++k) {
    const Index n = std::uniform_int_distribution<Index>(3, max_dim)(rng);
    const Index m = std::uniform_int_distribution<Index>(1, n - 1)(rng);
    const auto sys = random_mixed_system<Complex>(rng, n, m);
    const auto sol = solve_mixed(sys);
    record(verify_fundamental_identity(sys, sol));
    record(verify_stability_bounds(sys, sol));

    const VectorXc psi_h = sol.psi + 0.1 * detail::random_matrix<Complex>(rng, n, 1);
    const VectorXc u_h = sol.u + 0.1 * detail::random_matrix<Complex>(rng, m, 1);
    record(aposteriori_bounds(sys, sol, psi_h, u_h));

    // nested pair with a strictly coarser trial space, so that U_h differs from U
    const Index nf = std::uniform_int_distribution<Index>(3, max_dim)(rng);
    const Index mf = std::uniform_int_distribution<Index>(2, nf - 1)(rng);
    MixedSystem<Complex> fine = random_mixed_system<Complex>(rng, nf, mf);
    fine.load_l = fine.b_matrix * detail::random_matrix<Complex>(rng, mf, 1);
    fine.load_g = VectorXc::Zero(mf);
    const Index mc = std::uniform_int_distribution<Index>(1, mf - 1)(rng);
    const Index nc = std::uniform_int_distribution<Index>(mc, nf)(rng);
    const MatrixXc trial_basis = detail::random_matrix<Complex>(rng, mf, mc);
    const MatrixXc test_basis = detail::random_matrix<Complex>(rng, nf, nc);
    record(energy_error_identity(fine, trial_basis, test_basis).report);
  }

  std::vector<IdentitySummary> out;
  for (const auto &name : identity_names()) out.push_back(acc.at(name));
  return out;
}

namespace {

VectorXc local_slice(const VectorXc &global, const std::vector<Index> &map) {
  VectorXc out(Index(map.size()));
  for (std::size_t k = 0; k < map.size(); ++k) out(Index(k)) = global(map[k]);
  return out;
}

double sparse_max_abs(const SparseMatrixXc &m) {
  double v = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixXc::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

} // namespace

std::vector<PdeCheck> run_pde_checks(const AcousticsConfig &cfg, const StructuredMesh &mesh, std::uint64_t seed) {
  std::vector<PdeCheck> checks;
  const TrialDofLayout trial(mesh, cfg.p);
  const TestDofLayout test(mesh, cfg.p, cfg.dp);

  std::vector<ElementContribution> contribs;
  PdeCheck consistency{"plane_wave_consistency", 0.0, 0.0, 1e-8};
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    contribs.push_back(assemble_element(cfg, mesh, e, trial, test));
    const VectorXc exact = element_form_exact(cfg, mesh, e);
    consistency.value = std::max(consistency.value, max_abs(exact - contribs.back().load_l));
    consistency.scale = std::max({consistency.scale, max_abs(exact), max_abs(contribs.back().load_l)});
  }
  checks.push_back(consistency);

  const VectorXc g = assemble_load_adjoint(cfg, mesh, trial, Goal::manufactured);
  const GlobalSystem primal = assemble_global(trial, contribs, VectorXc::Zero(trial.size()), Method::dpg);
  const GlobalSystem dual = assemble_global(trial, contribs, g, Method::dpgstar);
  const SparseMatrixXc diff = primal.stiffness - dual.stiffness;
  checks.push_back({"shared_condensed_stiffness", sparse_max_abs(diff), sparse_max_abs(primal.stiffness), 0.0});

  const std::vector<bool> boundary = trial.boundary_trace_mask(mesh);
  PdeCheck support{"adjoint_load_support", 0.0, max_abs(g), 1e-10};
  for (Index k = 0; k < g.size(); ++k)
    if (!boundary[std::size_t(k)]) support.value = std::max(support.value, std::abs(g(k)));
  checks.push_back(support);

  RunOptions opts;
  opts.estimate_condition = false;
  const SolutionBundle primal_run = run(cfg, mesh, Method::dpg, opts);

  std::mt19937_64 rng(seed);
  VectorXc random_goal = VectorXc::Zero(trial.size());
  for (Index k = 0; k < trial.num_fields(); ++k) random_goal(k) = detail::random_scalar<Complex>(rng);

  const std::vector<std::pair<std::string, RunOptions>> goals = [&] {
    RunOptions manufactured = opts, uniform = opts, random = opts;
    uniform.goal = Goal::uniform_pressure;
    random.custom_goal = random_goal;
    return std::vector<std::pair<std::string, RunOptions>>{
        {"manufactured", manufactured}, {"uniform_pressure", uniform}, {"random_field", random}};
  }();
  for (const auto &[name, goal_opts] : goals) {
    const SolutionBundle dual_run = run(cfg, mesh, Method::dpgstar, goal_opts);
    const GoalCheck gc = goal_orthogonality_check(primal_run, dual_run);
    checks.push_back({"goal_galerkin_" + name, gc.galerkin, gc.galerkin_scale, 1e-8});
    checks.push_back({"goal_v_inner_" + name, gc.v_inner, gc.v_inner_scale, 1e-8});
  }
  return checks;
}

IdentitySuite run_identities(std::uint64_t seed, Index systems, Index max_dim) {
  IdentitySuite suite;
  suite.seed = seed;
  suite.systems = systems;
  suite.identities = run_mixed_core_suite(seed, systems, max_dim);
  AcousticsConfig cfg;
  cfg.dp = 1;
  suite.pde_checks = run_pde_checks(cfg, StructuredMesh(2, 2), seed);
  return suite;
}

std::string identities_json(const IdentitySuite &suite) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["seed"] = suite.seed;
  j["systems"] = suite.systems;
  j["identities"] = ordered_json::array();
  for (const auto &s : suite.identities) {
    ordered_json r;
    r["name"] = s.name;
    r["kind"] = s.is_identity ? "identity" : "inequality";
    r["checks"] = s.checks;
    r["failures"] = s.failures;
    if (s.is_identity) {
      r["max_gap"] = s.worst_gap;
      r["max_relative_gap"] = s.worst_relative_defect;
    } else {
      r["min_relative_slack"] = s.worst_slack;
    }
    r["pass"] = s.pass();
    j["identities"].push_back(r);
  }
  j["pde_checks"] = ordered_json::array();
  for (const auto &c : suite.pde_checks) {
    ordered_json r;
    r["name"] = c.name;
    r["value"] = c.value;
    r["scale"] = c.scale;
    r["tolerance"] = c.tolerance;
    r["pass"] = c.pass();
    j["pde_checks"].push_back(r);
  }
  j["all_pass"] = suite.all_pass();
  return j.dump(2) + "\n";
}

std::array<Complex, 3> evaluate_solution(const SolutionBundle &b, const Point &x) {
  const StructuredMesh &mesh = *b.mesh;
  const Index e = mesh.locate(x);
  const Element &el = mesh.element(e);
  QuadratureRule rule;
  rule.points = VectorXd(2);
  rule.points << std::clamp((x.x() - el.lower.x()) / el.hx(), 0.0, 1.0),
      std::clamp((x.y() - el.lower.y()) / el.hy(), 0.0, 1.0);
  rule.weights = VectorXd::Ones(2);
  // tensor index iy·2 + ix with ix = 0 (xi) and iy = 1 (eta)
  const Index row = 2, np = 4;

  VectorXc values;
  if (b.method == Method::dpg) {
    const TrialSample s = sample_trial_basis(mesh, *b.trial, e, rule);
    values = s.volume * local_slice(b.u, b.trial->element_map(e).global);
  } else {
    const TestSample s = sample_test_basis(b.cfg, el, rule);
    values = s.volume.topRows(3 * np) * b.psi[std::size_t(e)];
  }
  return {values(row), values(np + row), values(2 * np + row)};
}

std::vector<SampleRow> sample_solution(const SolutionBundle &b, Index n) {
  if (n < 2) throw ValidationError("--sample-grid must be >= 2");
  std::vector<SampleRow> rows;
  rows.reserve(std::size_t(n * n));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Point x(double(i) / double(n - 1), double(j) / double(n - 1));
      rows.push_back({x.x(), x.y(), evaluate_solution(b, x)});
    }
  return rows;
}

std::string CsvTable::str() const {
  std::string out = header + "\n";
  for (const auto &r : rows) out += r + "\n";
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string join(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto &c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

} // namespace

CsvTable table1_csv(const std::vector<Table1Row> &rows) {
  CsvTable t{"dp,dpg_l2_pct,dpgstar_l2_pct,dpgstar_graph_pct", {}};
  for (const auto &r : rows)
    t.rows.push_back(join({std::to_string(r.dp), format_number(r.dpg_l2_pct), format_number(r.dpgstar_l2_pct),
                           format_number(r.dpgstar_graph_pct)}));
  return t;
}

CsvTable hconv_csv(const std::vector<HconvRow> &rows) {
  CsvTable t{"p,dp,nx,ndof_trial,l2_err_pct,rate_h", {}};
  for (const auto &r : rows)
    t.rows.push_back(join({std::to_string(r.p), std::to_string(r.dp), std::to_string(r.nx),
                           std::to_string(r.ndof_trial), format_number(r.l2_err_pct),
                           r.rate_h ? format_number(*r.rate_h) : std::string()}));
  return t;
}

CsvTable solution_csv(const std::vector<SampleRow> &rows) {
  CsvTable t{"x,y,re_p,im_p,re_u1,im_u1,re_u2,im_u2", {}};
  for (const auto &r : rows)
    t.rows.push_back(join({format_number(r.x), format_number(r.y), format_number(r.values[0].real()),
                           format_number(r.values[0].imag()), format_number(r.values[1].real()),
                           format_number(r.values[1].imag()), format_number(r.values[2].real()),
                           format_number(r.values[2].imag())}));
  return t;
}

CsvTable lsq_csv(const std::vector<AlphaRow> &rows) {
  CsvTable t{"alpha,dist_to_lsq_l2,dpgstar_l2_err_pct,lsq_l2_err_pct", {}};
  for (const auto &r : rows)
    t.rows.push_back(join({format_number(r.alpha), format_number(r.dist_to_lsq_l2),
                           format_number(r.dpgstar_l2_err_pct), format_number(r.lsq_l2_err_pct)}));
  return t;
}

} // namespace dpg
