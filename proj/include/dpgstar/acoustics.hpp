#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dpgstar/mesh.hpp"
#include "dpgstar/spaces.hpp"
#include "dpgstar/types.hpp"

namespace dpg {

enum class NormKind { adjoint_graph, mathematician, scaled_graph, pure_graph };

/// Test inner product on the broken space. `alpha` weighs the L² part of the
/// graph norms (1 for the adjoint graph norm, 0 for the pure graph norm).
struct TestNorm {
  NormKind kind = NormKind::adjoint_graph;
  double alpha = 1.0;

  static TestNorm adjoint_graph() { return {NormKind::adjoint_graph, 1.0}; }
  static TestNorm mathematician() { return {NormKind::mathematician, 1.0}; }
  static TestNorm scaled_graph(double alpha) { return {NormKind::scaled_graph, alpha}; }
  static TestNorm pure_graph() { return {NormKind::pure_graph, 0.0}; }

  std::string name() const;
};

struct AcousticsConfig {
  double omega = 4.0 * 3.14159265358979323846;
  double angle_deg = 40.0;
  Index p = 3;
  Index dp = 1;
  TestNorm norm = TestNorm::adjoint_graph();
  Index quad_extra = 0; // extra Gauss points per direction on top of the default rules

  void validate() const;

  /// Points per direction for polynomial integrands.
  Index poly_points() const { return p + dp + 2 + quad_extra; }
  /// Points per direction for integrands containing the plane wave.
  Index wave_points(double h) const;
};

/// Plane wave p* = exp(iω d·x), u* = −d p*, d = (cos θ, sin θ): an exact
/// solution of iωp + div u = 0, iωu + ∇p = 0.
class PlaneWave {
public:
  PlaneWave(double omega, double angle_deg);
  explicit PlaneWave(const AcousticsConfig &cfg) : PlaneWave(cfg.omega, cfg.angle_deg) {}

  double omega() const { return omega_; }
  const Point &direction() const { return d_; }

  Complex pressure(const Point &x) const;
  Eigen::Vector2cd velocity(const Point &x) const;
  Eigen::Vector2cd pressure_gradient(const Point &x) const;
  Complex velocity_divergence(const Point &x) const;
  /// Impedance datum p* − u*·n.
  Complex impedance(const Point &x, const Point &normal) const;

private:
  double omega_;
  Point d_;
};

struct PlaneWaveValues {
  Complex p;
  Eigen::Vector2cd u;
  std::optional<Complex> g_bc;
};

PlaneWaveValues plane_wave_eval(const AcousticsConfig &cfg, const Point &x,
                                std::optional<Point> normal = std::nullopt);

/// Test functions sampled on one element: volume values at the tensor rule
/// (row blocks q, v₁, v₂, ∂ₓq, ∂ᵧq, div v, one row per point) and, per side,
/// q and v·n_K at the edge rule points. One column per test function.
struct TestSample {
  MatrixXc volume;
  std::array<MatrixXc, 4> q_edge;
  std::array<MatrixXc, 4> vn_edge;
  Index points = 0;

  Index cols() const { return volume.cols(); }
  auto block(int component) const { return volume.middleRows(Index(component) * points, points); }
};

/// Trial functions sampled on one element: volume row blocks p, u₁, u₂;
/// per side p̂ and û·n_K (the flux against the element's outward normal).
struct TrialSample {
  MatrixXc volume;
  std::array<MatrixXc, 4> trace;
  std::array<MatrixXc, 4> flux;
  Index points = 0;

  Index cols() const { return volume.cols(); }
};

/// Gauss rule for integrands containing the plane wave on this mesh.
QuadratureRule wave_rule(const AcousticsConfig &cfg, const StructuredMesh &mesh);

TestSample sample_test_basis(const AcousticsConfig &cfg, const Element &element, const QuadratureRule &rule);
TestSample sample_test_wave(const PlaneWave &wave, const Element &element, const QuadratureRule &rule);
TrialSample sample_trial_basis(const StructuredMesh &mesh, const TrialDofLayout &trial, Index element,
                               const QuadratureRule &rule);
/// Exact trial unknowns of the plane wave: fields (p*, u*), traces p̂ = −p*,
/// û·n = −u*·n on the skeleton.
TrialSample sample_trial_wave(const PlaneWave &wave, const StructuredMesh &mesh, Index element,
                              const QuadratureRule &rule);

/// b(trial_k, test_i) on one element, as a (test × trial) matrix.
MatrixXc element_form(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                      const TrialSample &trial, const TestSample &test, const QuadratureRule &rule);

/// Rows of the first-order operator applied to sampled test functions:
/// blocks iωq + div v, iωv₁ + ∂ₓq, iωv₂ + ∂ᵧq.
MatrixXc graph_rows(double omega, const TestSample &test);

/// L² Gram of the sampled (q, v) on one element.
MatrixXc element_l2_gram(const TestSample &test, const Element &element, const QuadratureRule &rule);

/// Test inner product matrix G_ij = (v_j, v_i)_V on one element.
MatrixXc element_gram(const AcousticsConfig &cfg, const TestSample &test, const Element &element,
                      const QuadratureRule &rule, const TestNorm &norm);

struct ElementContribution {
  Index element = -1;
  MatrixXc gram;              // test × test
  MatrixXc b_block;           // test × element-local trial
  VectorXc load_l;            // test
  std::vector<Index> trial_global; // element-local trial → global
  Index test_offset = 0;
};

MatrixXc assemble_element_gram(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element);
MatrixXc assemble_element_gram(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                               const TestNorm &norm);
MatrixXc assemble_element_b(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                            const TrialDofLayout &trial);
/// l(v) = −⟨g, q⟩_Γ on the boundary sides of one element.
VectorXc assemble_load_primal(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element);

/// Gram, B-block and primal load of one element.
ElementContribution assemble_element(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element,
                                     const TrialDofLayout &trial, const TestDofLayout &test);

enum class Goal { manufactured, uniform_pressure };

/// Second-equation load Ĝ_j = g(w_j).
/// manufactured: Ĝ_j = conj(b(w_j, ψ*)) with ψ* the plane wave, so the exact
/// adjoint solution is the plane wave itself; uniform_pressure: ∫_Ω (w_j)_p.
VectorXc assemble_load_adjoint(const AcousticsConfig &cfg, const StructuredMesh &mesh, const TrialDofLayout &trial,
                               Goal goal);

/// b(𝔲*, v_i) for every test basis function of one element, 𝔲* the exact
/// plane-wave trial unknowns.
VectorXc element_form_exact(const AcousticsConfig &cfg, const StructuredMesh &mesh, Index element);

/// Volume quadrature weights (scaled by the cell area) in tensor order.
VectorXd volume_weights(const Element &element, const QuadratureRule &rule);
/// Physical coordinates of the tensor quadrature points.
std::vector<Point> volume_points(const Element &element, const QuadratureRule &rule);

} // namespace dpg
