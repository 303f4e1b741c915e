#include "dpgstar/solver.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace dpg {

std::string to_string(Method m) { return m == Method::dpg ? "dpg" : "dpgstar"; }

CondensedElement condense_element(const ElementContribution &contrib) {
  HermitianFactor<Complex> g(contrib.gram, "local Gram of element " + std::to_string(contrib.element));
  const MatrixXc lb = g.lower_solve(contrib.b_block);
  const VectorXc ll = g.lower_solve(contrib.load_l);
  CondensedElement out;
  out.stiffness = lb.adjoint() * lb;
  out.stiffness = 0.5 * (out.stiffness + out.stiffness.adjoint()).eval();
  out.rhs = lb.adjoint() * ll;
  return out;
}

GlobalSystem assemble_global(const TrialDofLayout &trial, const std::vector<ElementContribution> &contribs,
                             const VectorXc &load_g, Method method) {
  const Index n = trial.size();
  if (load_g.size() != n) throw ValidationError("assemble_global: Ĝ length does not match the trial layout");

  GlobalSystem gs;
  gs.method = method;
  gs.rhs = VectorXc::Zero(n);
  gs.load_g = method == Method::dpgstar ? load_g : VectorXc::Zero(n);

  std::vector<Eigen::Triplet<Complex>> triplets;
  for (const auto &c : contribs) {
    for (Index g : c.trial_global)
      if (g < 0 || g >= n) throw ValidationError("assemble_global: element trial index out of range");
    if (c.b_block.cols() != Index(c.trial_global.size()) || c.b_block.rows() != c.gram.rows())
      throw ValidationError("assemble_global: element block shapes are inconsistent");

    ElementContribution local = c;
    if (method == Method::dpgstar) local.load_l.setZero();
    const CondensedElement ce = condense_element(local);

    const auto &map = c.trial_global;
    for (Index j = 0; j < Index(map.size()); ++j) {
      gs.rhs(map[std::size_t(j)]) += ce.rhs(j);
      for (Index i = 0; i < Index(map.size()); ++i)
        triplets.emplace_back(map[std::size_t(i)], map[std::size_t(j)], ce.stiffness(i, j));
    }

    ElementCache cache;
    cache.gram.compute(c.gram, "local Gram of element " + std::to_string(c.element));
    cache.gram_matrix = c.gram;
    cache.b_block = c.b_block;
    cache.load_l = local.load_l;
    cache.trial_global = c.trial_global;
    cache.test_offset = c.test_offset;
    gs.elements.push_back(std::move(cache));
  }
  gs.rhs -= gs.load_g;
  gs.stiffness.resize(n, n);
  gs.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  gs.stiffness.makeCompressed();
  return gs;
}

namespace {

using SparseLdlt = Eigen::SimplicialLDLT<SparseMatrixXc, Eigen::Lower>;

void factor_or_throw(SparseLdlt &ldlt, const SparseMatrixXc &s) {
  ldlt.compute(s);
  if (ldlt.info() != Eigen::Success)
    throw FactorizationError("global condensed system (discrete inf-sup)", 0);
  const VectorXc d = ldlt.vectorD();
  Index worst = 0;
  for (Index i = 1; i < d.size(); ++i)
    if (d(i).real() < d(worst).real()) worst = i;
  if (d.size() > 0 && !(d(worst).real() > 0.0)) {
    // report the pivot in the original numbering
    const Index original = ldlt.permutationPinv().indices()(worst);
    throw FactorizationError("global condensed system (discrete inf-sup)", original);
  }
}

} // namespace

GlobalSolve solve_global(const GlobalSystem &gs) {
  SparseLdlt ldlt;
  factor_or_throw(ldlt, gs.stiffness);
  GlobalSolve out;
  out.u = ldlt.solve(gs.rhs);
  const double rn = gs.rhs.norm();
  out.relative_residual = rn > 0.0 ? (gs.stiffness * out.u - gs.rhs).norm() / rn : (gs.stiffness * out.u).norm();
  return out;
}

std::vector<VectorXc> back_substitute(const GlobalSystem &gs, const VectorXc &u) {
  std::vector<VectorXc> psi;
  psi.reserve(gs.elements.size());
  for (const auto &e : gs.elements) {
    VectorXc uk(Index(e.trial_global.size()));
    for (std::size_t k = 0; k < e.trial_global.size(); ++k) uk(Index(k)) = u(e.trial_global[k]);
    psi.push_back(e.gram.solve(e.load_l - e.b_block * uk));
  }
  return psi;
}

double condition_estimate(const GlobalSystem &gs, int iterations) {
  const Index n = gs.size();
  if (n == 0) return 1.0;
  SparseLdlt ldlt;
  factor_or_throw(ldlt, gs.stiffness);

  VectorXc start(n);
  for (Index i = 0; i < n; ++i) start(i) = Complex(1.0 + 0.37 * std::sin(double(i + 1)), 0.21 * std::cos(double(i)));
  start.normalize();

  VectorXc x = start;
  double lmax = 0.0;
  for (int it = 0; it < iterations; ++it) {
    VectorXc y = gs.stiffness * x;
    lmax = std::real(x.dot(y));
    x = y.normalized();
  }
  x = start;
  double inv_max = 0.0;
  for (int it = 0; it < iterations; ++it) {
    VectorXc y = ldlt.solve(x);
    inv_max = std::real(x.dot(y));
    x = y.normalized();
  }
  return inv_max > 0.0 ? lmax * inv_max : std::numeric_limits<double>::infinity();
}

SolutionBundle run(const AcousticsConfig &cfg, const StructuredMesh &mesh, Method method, const RunOptions &options) {
  cfg.validate();
  SolutionBundle b;
  b.method = method;
  b.cfg = cfg;
  b.mesh = std::make_shared<const StructuredMesh>(mesh);
  b.trial = std::make_shared<const TrialDofLayout>(mesh, cfg.p);
  b.test = std::make_shared<const TestDofLayout>(mesh, cfg.p, cfg.dp);

  std::vector<ElementContribution> contribs;
  contribs.reserve(std::size_t(mesh.num_elements()));
  for (Index e = 0; e < mesh.num_elements(); ++e) contribs.push_back(assemble_element(cfg, mesh, e, *b.trial, *b.test));

  VectorXc load_g = VectorXc::Zero(b.trial->size());
  if (method == Method::dpgstar) {
    if (options.custom_goal) {
      if (options.custom_goal->size() != b.trial->size())
        throw ValidationError("custom goal vector has the wrong length");
      load_g = *options.custom_goal;
    } else {
      load_g = assemble_load_adjoint(cfg, mesh, *b.trial, options.goal);
    }
  }

  auto gs = std::make_shared<GlobalSystem>(assemble_global(*b.trial, contribs, load_g, method));
  const GlobalSolve solved = solve_global(*gs);
  b.u = solved.u;
  b.solve_residual = solved.relative_residual;
  b.psi = back_substitute(*gs, b.u);
  if (options.estimate_condition) b.condition = condition_estimate(*gs);

  VectorXc bh_psi = VectorXc::Zero(b.trial->size());
  for (std::size_t k = 0; k < gs->elements.size(); ++k) {
    const auto &e = gs->elements[k];
    VectorXc uk(Index(e.trial_global.size()));
    for (std::size_t j = 0; j < e.trial_global.size(); ++j) uk(Index(j)) = b.u(e.trial_global[j]);
    const VectorXc r = e.gram_matrix * b.psi[k] + e.b_block * uk - e.load_l;
    b.first_residual = std::max(b.first_residual, max_abs(r));
    b.first_scale = std::max({b.first_scale, max_abs(e.load_l), max_abs(e.gram_matrix) * max_abs(b.psi[k]),
                              max_abs(e.b_block) * max_abs(uk)});
    const VectorXc local = e.b_block.adjoint() * b.psi[k];
    for (std::size_t j = 0; j < e.trial_global.size(); ++j) bh_psi(e.trial_global[j]) += local(Index(j));
    b.second_scale = std::max(b.second_scale, max_abs(e.b_block) * max_abs(b.psi[k]));
  }
  b.second_residual = max_abs(bh_psi - gs->load_g);
  b.second_scale = std::max(b.second_scale, max_abs(gs->load_g));
  b.system = std::move(gs);
  return b;
}

MixedSystem<Complex> flatten_to_mixed(const AcousticsConfig &cfg, const StructuredMesh &mesh, Method method,
                                      Goal goal) {
  cfg.validate();
  const TrialDofLayout trial(mesh, cfg.p);
  const TestDofLayout test(mesh, cfg.p, cfg.dp);
  MixedSystem<Complex> sys;
  sys.gram = MatrixXc::Zero(test.size(), test.size());
  sys.b_matrix = MatrixXc::Zero(test.size(), trial.size());
  sys.load_l = VectorXc::Zero(test.size());
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ElementContribution c = assemble_element(cfg, mesh, e, trial, test);
    const Index off = c.test_offset, nt = c.gram.rows();
    sys.gram.block(off, off, nt, nt) = c.gram;
    for (std::size_t k = 0; k < c.trial_global.size(); ++k)
      sys.b_matrix.block(off, c.trial_global[k], nt, 1) += c.b_block.col(Index(k));
    if (method == Method::dpg) sys.load_l.segment(off, nt) = c.load_l;
  }
  sys.load_g = method == Method::dpgstar ? assemble_load_adjoint(cfg, mesh, trial, goal)
                                         : VectorXc::Zero(trial.size());
  return sys;
}

VectorXc gather_psi(const SolutionBundle &bundle) {
  VectorXc out(bundle.test->size());
  for (std::size_t k = 0; k < bundle.psi.size(); ++k)
    out.segment(bundle.test->offset(Index(k)), bundle.psi[k].size()) = bundle.psi[k];
  return out;
}

} // namespace dpg
