#pragma once

#include <vector>

#include "dpgstar/acoustics.hpp"
#include "dpgstar/mesh.hpp"
#include "dpgstar/spaces.hpp"

namespace dpg {

/// Weakly conforming least squares for the adjoint problem:
///
///   minimize ½‖A*ψ − g‖² over the broken test space
///   subject to  ⟨ψ, δû⟩ = c  for every trace basis function δû
///
/// as the Hermitian saddle system [[G₀, T], [Tᴴ, 0]] [ψ; û] = [rhs_top; c].
struct LsqSystem {
  MatrixXc gram0;       // (A*ψ_j, A*ψ_i), block diagonal over elements
  MatrixXc constraint;  // T: test × trace unknowns, trace columns of B
  VectorXc rhs_top;     // (g, A*v_i)
  VectorXc rhs_constraint;
  std::vector<Index> trace_dofs; // global trial index of each constraint column

  Index test_dim() const { return gram0.rows(); }
  Index constraint_dim() const { return constraint.cols(); }
  MatrixXc saddle_matrix() const;
};

struct LsqSolution {
  VectorXc psi;
  VectorXc multiplier;
  double constraint_residual = 0.0; // max|Tᴴψ − c|
  double constraint_scale = 0.0;
};

struct Inertia {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;
};

/// manufactured: g = A*ψ* (≡ 0 for the plane wave) and c = the trace pairing
/// of ψ*; otherwise all data are zero.
LsqSystem assemble_lsq(const AcousticsConfig &cfg, const StructuredMesh &mesh, bool manufactured);

LsqSolution solve_lsq(const LsqSystem &ls);

/// Eigenvalue sign counts of the saddle matrix; a leading block that is
/// positive definite on ker Tᴴ gives (test_dim, constraint_dim, 0).
Inertia saddle_inertia(const LsqSystem &ls);

/// Block-diagonal L² Gram of the broken test space.
MatrixXc test_l2_gram(const AcousticsConfig &cfg, const StructuredMesh &mesh);

struct AlphaRow {
  double alpha = 0.0;
  double dist_to_lsq_l2 = 0.0;
  double dpgstar_l2_err_pct = 0.0;
  double lsq_l2_err_pct = 0.0;
};

/// DPG* with the scaled graph norm for each α against the least-squares
/// solution. `alphas` must be positive and strictly descending.
std::vector<AlphaRow> alpha_sweep(const AcousticsConfig &cfg, const StructuredMesh &mesh,
                                  const std::vector<double> &alphas);

} // namespace dpg
