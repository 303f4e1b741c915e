#pragma once

// Matrix-level mixed saddle problem
//
//   G Ψ + B U = L
//   Bᴴ Ψ      = Ĝ
//
// with G the Hermitian positive definite Gram matrix of the test inner
// product, B_ij = b(u_j, v_i), L_i = l(v_i) and Ĝ_j = g(u_j). Everything the
// finite element solver does reduces to this system, and every norm identity
// and bound it satisfies is checked here in the language of matrices:
//
//   ‖v‖_V      = sqrt(vᴴ G v)
//   ‖f‖_{V'}   = sqrt(fᴴ G⁻¹ f)
//   ‖w‖_E      = ‖B w‖_{V'}
//   ‖g‖_{U'}   = sqrt(gᴴ S⁻¹ g),   S = Bᴴ G⁻¹ B

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dpgstar/linalg.hpp"
#include "dpgstar/types.hpp"

namespace dpg {

template <typename Scalar>
struct MixedSystem {
  Matrix<Scalar> gram;     // n × n
  Matrix<Scalar> b_matrix; // n × m
  Vector<Scalar> load_l;   // n
  Vector<Scalar> load_g;   // m

  Index test_dim() const { return gram.rows(); }
  Index trial_dim() const { return b_matrix.cols(); }

  void validate() const {
    const Index n = gram.rows();
    if (gram.cols() != n) throw ValidationError("mixed system: Gram matrix is not square");
    if (b_matrix.rows() != n) throw ValidationError("mixed system: B has wrong row count");
    if (b_matrix.cols() > n) throw ValidationError("mixed system: more trial than test unknowns");
    if (load_l.size() != n) throw ValidationError("mixed system: L has wrong length");
    if (load_g.size() != b_matrix.cols()) throw ValidationError("mixed system: Ĝ has wrong length");
    const double scale = max_abs(gram);
    if (max_abs(gram - gram.adjoint()) > 1e-12 * scale)
      throw ValidationError("mixed system: Gram matrix is not Hermitian");
  }
};

template <typename Scalar>
struct MixedSolution {
  Vector<Scalar> psi;
  Vector<Scalar> u;
  double res1 = 0.0; // max|GΨ + BU − L|
  double res2 = 0.0; // max|BᴴΨ − Ĝ|
};

template <typename Scalar>
struct KernelSplit {
  Vector<Scalar> psi0;
  Vector<Scalar> psi_perp;
};

/// One line of an identity or inequality check, in the units of the inputs.
struct IdentityRecord {
  std::string name;
  bool is_identity = true; // identity: gap = |lhs − rhs|; inequality: slack = rhs − lhs
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double slack = 0.0;
  double tolerance = 1e-10;

  bool pass() const {
    if (is_identity) return gap <= tolerance * std::max(std::abs(lhs), std::abs(rhs));
    return slack >= -tolerance * std::abs(rhs);
  }

  /// Gap (or violated slack) relative to the larger side.
  double relative_defect() const {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    const double defect = is_identity ? gap : std::max(-slack, 0.0);
    return scale > 0.0 ? defect / scale : defect;
  }
};

struct IdentityReport {
  std::vector<IdentityRecord> records;

  bool all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const auto &r) { return r.pass(); });
  }

  const IdentityRecord &at(std::string_view name) const {
    for (const auto &r : records)
      if (r.name == name) return r;
    throw std::out_of_range("identity report has no record '" + std::string(name) + "'");
  }

  void append(const IdentityReport &other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
  }
};

inline IdentityRecord make_identity(std::string name, double lhs, double rhs, double tol = 1e-10) {
  return {std::move(name), true, lhs, rhs, std::abs(lhs - rhs), 0.0, tol};
}

inline IdentityRecord make_inequality(std::string name, double lhs, double rhs, double tol = 1e-10) {
  return {std::move(name), false, lhs, rhs, 0.0, rhs - lhs, tol};
}

/// Factorizations of G and of the Schur complement S = Bᴴ G⁻¹ B, shared by
/// every operation on one system.
template <typename Scalar>
class MixedFactors {
public:
  explicit MixedFactors(const MixedSystem<Scalar> &sys) : sys_(&sys) {
    gram_.compute(sys.gram, "Gram matrix");
    lb_ = gram_.lower_solve(sys.b_matrix);
    Matrix<Scalar> s = lb_.adjoint() * lb_;
    schur_.compute(s, "Schur complement (discrete inf-sup)");
  }

  const HermitianFactor<Scalar> &gram() const { return gram_; }
  const HermitianFactor<Scalar> &schur() const { return schur_; }
  /// L_G⁻¹ B
  const Matrix<Scalar> &scaled_b() const { return lb_; }
  const MixedSystem<Scalar> &system() const { return *sys_; }

  double v_norm(const Vector<Scalar> &psi) const { return weighted_norm(sys_->gram, psi); }
  double v_dual_norm(const Vector<Scalar> &f) const { return gram_.inverse_norm(f); }
  double u_dual_norm(const Vector<Scalar> &g) const { return schur_.inverse_norm(g); }

private:
  const MixedSystem<Scalar> *sys_;
  HermitianFactor<Scalar> gram_;
  HermitianFactor<Scalar> schur_;
  Matrix<Scalar> lb_;
};

template <typename Scalar>
MixedSolution<Scalar> solve_mixed(const MixedFactors<Scalar> &f) {
  const auto &sys = f.system();
  MixedSolution<Scalar> sol;
  Vector<Scalar> ll = f.gram().lower_solve(sys.load_l);
  Vector<Scalar> rhs = f.scaled_b().adjoint() * ll - sys.load_g;
  sol.u = f.schur().solve(rhs);
  sol.psi = f.gram().solve(sys.load_l - sys.b_matrix * sol.u);
  sol.res1 = max_abs(sys.gram * sol.psi + sys.b_matrix * sol.u - sys.load_l);
  sol.res2 = max_abs(sys.b_matrix.adjoint() * sol.psi - sys.load_g);
  return sol;
}

/// Solves the saddle system by eliminating Ψ (normal equation for U), then
/// recovering Ψ = G⁻¹(L − BU). Throws FactorizationError if G is not positive
/// definite or if B is (numerically) rank deficient.
template <typename Scalar>
MixedSolution<Scalar> solve_mixed(const MixedSystem<Scalar> &sys) {
  sys.validate();
  return solve_mixed(MixedFactors<Scalar>(sys));
}

/// Residual scale used for the self-check of solve_mixed.
template <typename Scalar>
double residual_scale(const MixedSystem<Scalar> &sys, const MixedSolution<Scalar> &sol) {
  return max_abs(sys.load_l) + max_abs(sys.gram) * max_abs(sol.psi) +
         max_abs(sys.b_matrix) * max_abs(sol.u) + max_abs(sys.load_g);
}

/// sqrt(fᴴ G⁻¹ f)
template <typename Scalar>
double dual_norm(const Matrix<Scalar> &gram, const Vector<Scalar> &f) {
  return HermitianFactor<Scalar>(gram, "Gram matrix").inverse_norm(f);
}

/// ‖w‖_E = ‖B w‖_{V'}
template <typename Scalar>
double energy_norm(const MixedSystem<Scalar> &sys, const Vector<Scalar> &w) {
  return dual_norm<Scalar>(sys.gram, sys.b_matrix * w);
}

/// sqrt(gᴴ S⁻¹ g), the dual of the energy norm.
template <typename Scalar>
double dual_energy_norm(const MixedSystem<Scalar> &sys, const Vector<Scalar> &g) {
  return MixedFactors<Scalar>(sys).u_dual_norm(g);
}

template <typename Scalar>
KernelSplit<Scalar> kernel_decompose(const MixedFactors<Scalar> &f, const Vector<Scalar> &psi) {
  const auto &sys = f.system();
  Vector<Scalar> w = f.schur().solve(sys.b_matrix.adjoint() * psi);
  KernelSplit<Scalar> split;
  split.psi_perp = f.gram().solve(sys.b_matrix * w);
  split.psi0 = psi - split.psi_perp;
  return split;
}

/// G-orthogonal split Ψ = Ψ₀ + Ψ⊥ with Bᴴ Ψ₀ = 0 and Ψ⊥ ∈ G⁻¹ range(B).
template <typename Scalar>
KernelSplit<Scalar> kernel_decompose(const MixedSystem<Scalar> &sys, const Vector<Scalar> &psi) {
  return kernel_decompose(MixedFactors<Scalar>(sys), psi);
}

/// Pythagoras split, the dual-norm identity for Ĝ = BᴴΨ, and the
/// fundamental identity ‖Ψ‖² + ‖BU‖² = ‖L − GΨ⊥‖² + ‖Ĝ‖²_{U'}.
template <typename Scalar>
IdentityReport verify_fundamental_identity(const MixedSystem<Scalar> &sys, const MixedSolution<Scalar> &sol) {
  MixedFactors<Scalar> f(sys);
  const auto split = kernel_decompose(f, sol.psi);

  const double psi0 = f.v_norm(split.psi0);
  const double psi_perp = f.v_norm(split.psi_perp);
  const double psi = f.v_norm(sol.psi);
  const double bu = f.v_dual_norm(sys.b_matrix * sol.u);
  const double reduced_load = f.v_dual_norm(sys.load_l - sys.gram * split.psi_perp);
  const double g = f.u_dual_norm(sys.load_g);
  const double bh_psi = f.u_dual_norm(sys.b_matrix.adjoint() * sol.psi);

  IdentityReport report;
  report.records.push_back(make_identity("pythagoras", psi0 * psi0 + bu * bu, reduced_load * reduced_load));
  report.records.push_back(make_identity("dual_norm_identity", bh_psi * bh_psi, psi_perp * psi_perp));
  report.records.push_back(
      make_identity("fundamental_identity", psi * psi + bu * bu, reduced_load * reduced_load + g * g));
  return report;
}

/// A-priori bounds on (Ψ, U) in terms of ‖L‖_{V'} and ‖Ĝ‖_{U'}.
template <typename Scalar>
IdentityReport verify_stability_bounds(const MixedSystem<Scalar> &sys, const MixedSolution<Scalar> &sol) {
  MixedFactors<Scalar> f(sys);
  const double l = f.v_dual_norm(sys.load_l);
  const double g = f.u_dual_norm(sys.load_g);
  const double psi = f.v_norm(sol.psi);
  const double bu = f.v_dual_norm(sys.b_matrix * sol.u);

  IdentityReport report;
  report.records.push_back(make_inequality("stability_bound", psi * psi + bu * bu, (l + g) * (l + g) + g * g));
  report.records.push_back(make_inequality("energy_bound", bu, l + g));
  report.records.push_back(make_inequality("psi_bound", psi * psi, l * l + g * g));
  return report;
}

/// Residual-based error bounds for an arbitrary candidate (Ψ_h, U_h) against
/// the exact solution `sol` of `sys`.
template <typename Scalar>
IdentityReport aposteriori_bounds(const MixedSystem<Scalar> &sys, const MixedSolution<Scalar> &sol,
                                  const Vector<Scalar> &psi_h, const Vector<Scalar> &u_h) {
  MixedFactors<Scalar> f(sys);
  const double err_psi = f.v_norm(sol.psi - psi_h);
  const double err_u = f.v_dual_norm(sys.b_matrix * (sol.u - u_h));
  const double r1 = f.v_dual_norm(sys.load_l - sys.gram * psi_h - sys.b_matrix * u_h);
  const double r2 = f.u_dual_norm(sys.load_g - sys.b_matrix.adjoint() * psi_h);

  IdentityReport report;
  report.records.push_back(
      make_inequality("aposteriori_bound", err_psi * err_psi + err_u * err_u, (r1 + r2) * (r1 + r2) + r2 * r2));
  report.records.push_back(make_inequality("aposteriori_energy_bound", err_u, r1 + r2));
  report.records.push_back(make_inequality("aposteriori_psi_bound", err_psi * err_psi, r1 * r1 + r2 * r2));
  return report;
}

/// Result of a nested (coarse inside fine) solve, lifted to the fine space.
template <typename Scalar>
struct NestedSolve {
  Vector<Scalar> psi_h;
  Vector<Scalar> u_h;
  Vector<Scalar> u_fine;
  IdentityReport report;
};

/// Energy error identity for the primal case (Ĝ = 0, L ∈ range(B), so the
/// fine Ψ vanishes):
///
///   ‖B(U − U_h)‖²_{V'} = ‖L − GΨ_h − BU_h‖²_{V'} + ‖Ψ_h‖²_V
///
/// where (Ψ_h, U_h) solve the mixed problem restricted to span(test_basis) ×
/// span(trial_basis) and all norms are those of the fine system.
template <typename Scalar>
NestedSolve<Scalar> energy_error_identity(const MixedSystem<Scalar> &fine, const Matrix<Scalar> &trial_basis,
                                          const Matrix<Scalar> &test_basis) {
  fine.validate();
  if (trial_basis.rows() != fine.trial_dim() || test_basis.rows() != fine.test_dim())
    throw ValidationError("energy identity: coarse bases do not live in the fine spaces");

  MixedFactors<Scalar> f(fine);
  const auto fine_sol = solve_mixed(f);
  const double load = f.v_dual_norm(fine.load_l);
  if (max_abs(fine.load_g) != 0.0 || f.v_norm(fine_sol.psi) > 1e-10 * std::max(load, 1e-300))
    throw PreconditionError("energy identity: the fine error representation is not zero "
                            "(requires Ĝ = 0 and L in range(B))");

  MixedSystem<Scalar> coarse;
  coarse.gram = test_basis.adjoint() * fine.gram * test_basis;
  coarse.gram = Scalar(0.5) * (coarse.gram + coarse.gram.adjoint()).eval();
  coarse.b_matrix = test_basis.adjoint() * fine.b_matrix * trial_basis;
  coarse.load_l = test_basis.adjoint() * fine.load_l;
  coarse.load_g = Vector<Scalar>::Zero(trial_basis.cols());
  const auto coarse_sol = solve_mixed(coarse);

  NestedSolve<Scalar> out;
  out.psi_h = test_basis * coarse_sol.psi;
  out.u_h = trial_basis * coarse_sol.u;
  out.u_fine = fine_sol.u;

  const double err = f.v_dual_norm(fine.b_matrix * (fine_sol.u - out.u_h));
  const double res = f.v_dual_norm(fine.load_l - fine.gram * out.psi_h - fine.b_matrix * out.u_h);
  const double psi = f.v_norm(out.psi_h);
  out.report.records.push_back(make_identity("nested_energy_identity", err * err, res * res + psi * psi));
  return out;
}

/// Spectral condition number of S = Bᴴ G⁻¹ B (dense eigensolve).
template <typename Scalar>
double schur_condition(const MixedSystem<Scalar> &sys) {
  MixedFactors<Scalar> f(sys);
  Matrix<Scalar> s = f.scaled_b().adjoint() * f.scaled_b();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(s, Eigen::EigenvaluesOnly);
  const auto &ev = eig.eigenvalues();
  return ev(ev.size() - 1) / ev(0);
}

namespace detail {

template <typename Scalar, typename Rng>
Scalar random_scalar(Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    const double re = normal(rng);
    const double im = normal(rng);
    return Scalar(re, im);
  } else {
    return Scalar(normal(rng));
  }
}

template <typename Scalar, typename Rng>
Matrix<Scalar> random_matrix(Rng &rng, Index rows, Index cols) {
  Matrix<Scalar> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = random_scalar<Scalar>(rng);
  return m;
}

} // namespace detail

/// Random well-conditioned system: G = MᴴM + n·I, B re-drawn until its
/// smallest singular value exceeds 1e−6, random L and Ĝ.
template <typename Scalar, typename Rng>
MixedSystem<Scalar> random_mixed_system(Rng &rng, Index n, Index m) {
  if (n < 1 || m < 1 || m > n) throw ValidationError("random system requires 1 <= m <= n");
  MixedSystem<Scalar> sys;
  Matrix<Scalar> base = detail::random_matrix<Scalar>(rng, n, n);
  sys.gram = base.adjoint() * base;
  sys.gram += Scalar(double(n)) * Matrix<Scalar>::Identity(n, n);
  sys.gram = Scalar(0.5) * (sys.gram + sys.gram.adjoint()).eval();
  for (;;) {
    sys.b_matrix = detail::random_matrix<Scalar>(rng, n, m);
    Eigen::JacobiSVD<Matrix<Scalar>> svd(sys.b_matrix);
    if (svd.singularValues()(m - 1) > 1e-6) break;
  }
  sys.load_l = detail::random_matrix<Scalar>(rng, n, 1);
  sys.load_g = detail::random_matrix<Scalar>(rng, m, 1);
  return sys;
}

} // namespace dpg
