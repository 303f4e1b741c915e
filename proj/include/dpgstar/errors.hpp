#pragma once

#include <functional>
#include <vector>

#include "dpgstar/acoustics.hpp"
#include "dpgstar/solver.hpp"

namespace dpg {

/// Relative L² error of a (p, u₁, u₂)-type triple against the plane wave.
struct ErrorReport {
  double l2_rel_pct = 0.0;
  double graph_rel_pct = 0.0; // dpgstar only
  std::array<double, 3> abs_error{};   // per component L² error
  std::array<double, 3> exact_norm{};  // per component L² norm of the exact solution
  double denominator = 0.0;
};

/// Discrete values at the tensor quadrature points of an element, row blocks
/// (p, u₁, u₂), or (q, v₁, v₂) for DPG*; one row per point.
using ElementEvaluator = std::function<MatrixXc(Index element, const QuadratureRule &rule)>;

ErrorReport l2_error(const AcousticsConfig &cfg, const StructuredMesh &mesh, const ElementEvaluator &discrete);

/// dpg: fields (p, u) of the trial solution; dpgstar: ψ_h = (q, v).
ErrorReport field_l2_error(const SolutionBundle &bundle);

/// L² error of a global test-space coefficient vector (element blocks).
ErrorReport test_space_l2_error(const AcousticsConfig &cfg, const StructuredMesh &mesh, const TestDofLayout &test,
                                const VectorXc &psi);

/// 100·‖ψ* − ψ_h‖_V / ‖ψ*‖_V in the broken adjoint graph norm.
double graph_norm_error(const SolutionBundle &bundle);
double graph_norm_error(const AcousticsConfig &cfg, const StructuredMesh &mesh, const TestDofLayout &test,
                        const VectorXc &psi);

struct RatePoint {
  double h = 0.0;
  double ndof = 0.0;
  double error = 0.0;
};

struct Rates {
  std::vector<double> h_rates;   // per interval, positive for decreasing error
  std::vector<double> dof_rates; // −d log e / d log N per interval
  double h_slope = 0.0;          // least-squares fit over all points
  double dof_slope = 0.0;
};

Rates convergence_rates(const std::vector<RatePoint> &series);

struct GoalCheck {
  double galerkin = 0.0;       // |b(𝔲* − 𝔲_h, φ_h)|
  double galerkin_scale = 0.0;
  double v_inner = 0.0;        // |(ψ_h, φ_h)_V|
  double v_inner_scale = 0.0;
};

/// Discrete orthogonality consequences of the goal-oriented identity, for a
/// dpg run (primal) and a dpgstar run (dual) on the same configuration.
GoalCheck goal_orthogonality_check(const SolutionBundle &primal, const SolutionBundle &dual);

struct AlphaH {
  double alpha_h = 0.0;
  Index null_dim = 0;
};

/// Smallest ‖A*ψ‖ / ‖ψ‖ over weakly conforming discrete test functions
/// (ker Tᴴ), via a dense generalized Hermitian eigensolve on an orthonormal
/// basis of the kernel.
AlphaH estimate_alpha_h(const AcousticsConfig &cfg, const StructuredMesh &mesh);

/// Orthonormal basis of ker Tᴴ = range(T)^⊥.
MatrixXc conforming_basis(const MatrixXc &constraint);

} // namespace dpg
