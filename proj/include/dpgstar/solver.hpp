#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "dpgstar/acoustics.hpp"
#include "dpgstar/linalg.hpp"
#include "dpgstar/mesh.hpp"
#include "dpgstar/mixed_core.hpp"
#include "dpgstar/spaces.hpp"

namespace dpg {

enum class Method { dpg, dpgstar };

std::string to_string(Method m);

using SparseMatrixXc = Eigen::SparseMatrix<Complex>;

struct CondensedElement {
  MatrixXc stiffness; // B_Kᴴ G_K⁻¹ B_K
  VectorXc rhs;       // B_Kᴴ G_K⁻¹ l_K
};

/// Static condensation of the error representation on one element.
CondensedElement condense_element(const ElementContribution &contrib);

/// Per-element data kept for back-substitution.
struct ElementCache {
  HermitianFactor<Complex> gram;
  MatrixXc gram_matrix;
  MatrixXc b_block;
  VectorXc load_l;
  std::vector<Index> trial_global;
  Index test_offset = 0;
};

struct GlobalSystem {
  Method method = Method::dpg;
  SparseMatrixXc stiffness;
  VectorXc rhs;
  VectorXc load_g; // zero for dpg
  std::vector<ElementCache> elements;

  Index size() const { return stiffness.rows(); }
};

/// S = Σ scatter(S_K), rhs = Σ scatter(r_K) − Ĝ. Element loads are used only
/// for dpg and Ĝ only for dpgstar.
GlobalSystem assemble_global(const TrialDofLayout &trial, const std::vector<ElementContribution> &contribs,
                             const VectorXc &load_g, Method method);

struct GlobalSolve {
  VectorXc u;
  double relative_residual = 0.0;
};

/// Sparse Hermitian LDLᴴ solve of the condensed system. A non-positive pivot
/// is reported as a FactorizationError (loss of discrete inf-sup stability).
GlobalSolve solve_global(const GlobalSystem &gs);

/// Ψ_K = G_K⁻¹ (l_K − B_K U_K) on every element.
std::vector<VectorXc> back_substitute(const GlobalSystem &gs, const VectorXc &u);

/// Spectral condition estimate of S by power iteration on S and S⁻¹.
double condition_estimate(const GlobalSystem &gs, int iterations = 60);

struct SolutionBundle {
  Method method = Method::dpg;
  AcousticsConfig cfg;
  std::shared_ptr<const StructuredMesh> mesh;
  std::shared_ptr<const TrialDofLayout> trial;
  std::shared_ptr<const TestDofLayout> test;
  std::shared_ptr<const GlobalSystem> system;

  VectorXc u;                 // trial coefficients (fields, p̂, û·n)
  std::vector<VectorXc> psi;  // per-element test coefficients

  double condition = 0.0;
  double solve_residual = 0.0;
  double first_residual = 0.0;   // max_K max|G_KΨ_K + B_KU_K − l_K|
  double first_scale = 0.0;
  double second_residual = 0.0;  // max|BᴴΨ − Ĝ|
  double second_scale = 0.0;

  Index ndof_trial() const { return u.size(); }
};

struct RunOptions {
  Goal goal = Goal::manufactured;
  std::optional<VectorXc> custom_goal; // overrides `goal` for dpgstar
  bool estimate_condition = true;
};

/// Full pipeline: layouts, element assembly, condensation, global solve and
/// back-substitution. dpg uses the primal load and Ĝ = 0; dpgstar uses l = 0
/// and the adjoint load.
SolutionBundle run(const AcousticsConfig &cfg, const StructuredMesh &mesh, Method method,
                   const RunOptions &options = {});

/// The whole discrete problem as one monolithic mixed system (block-diagonal
/// Gram over all elements), for cross-checking the condensation pipeline.
MixedSystem<Complex> flatten_to_mixed(const AcousticsConfig &cfg, const StructuredMesh &mesh, Method method,
                                      Goal goal = Goal::manufactured);

/// Concatenated per-element Ψ in global test numbering.
VectorXc gather_psi(const SolutionBundle &bundle);

} // namespace dpg
