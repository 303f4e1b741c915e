#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "dpgstar/mesh.hpp"
#include "dpgstar/types.hpp"

namespace dpg {

/// Gauss–Legendre rule on [0, 1].
struct QuadratureRule {
  VectorXd points;
  VectorXd weights;

  Index size() const { return points.size(); }
};

/// n-point rule, exact for polynomials of degree 2n − 1.
QuadratureRule gauss_rule(Index n);

/// Gauss–Lobatto–Legendre nodes of the given order on [0, 1] (order + 1
/// nodes, endpoints included). Order 0 is the midpoint.
VectorXd lobatto_nodes(Index order);

/// Shape function values and first derivatives at a set of points, one row
/// per point and one column per shape function.
struct BasisValues {
  MatrixXd values;
  MatrixXd derivatives;
};

/// 1D nodal Lagrange basis of a given order on [0, 1].
class LagrangeBasis {
public:
  explicit LagrangeBasis(Index order);

  Index order() const { return order_; }
  Index size() const { return order_ + 1; }
  const VectorXd &nodes() const { return nodes_; }

  BasisValues eval(const VectorXd &points) const;

private:
  Index order_;
  VectorXd nodes_;
  VectorXd barycentric_; // 1 / Π_{k≠j} (x_j − x_k)
};

inline BasisValues eval_basis(Index order, const VectorXd &points) { return LagrangeBasis(order).eval(points); }

/// Element-local view of the trial unknowns touching one element: the three
/// field blocks, the four corner p̂ values, the p̂ edge interiors and the û·n
/// blocks of the interior sides.
struct ElementTrialMap {
  std::vector<Index> global;                // local column → global trial index
  std::array<std::vector<Index>, 4> trace;  // per side: edge trace basis k (0..p) → local column
  std::array<std::vector<Index>, 4> flux;   // per side: edge flux basis k (0..p−1) → local column, empty on Γ
  Index field_count = 0;                    // 3p², stored first

  Index size() const { return Index(global.size()); }
};

/// Exact-sequence trial space: fields p, u₁, u₂ of tensor order p − 1 per
/// element, a continuous order-p trace p̂ on the skeleton, and an order p − 1
/// flux û·n on every interior edge.
///
/// Global numbering: fields (element-major, p then u₁ then u₂), then p̂
/// (vertices, then edge interiors edge-major), then û·n (interior edges).
class TrialDofLayout {
public:
  TrialDofLayout(const StructuredMesh &mesh, Index p);

  Index order() const { return p_; }
  Index field_order() const { return p_ - 1; }
  Index field_block() const { return p_ * p_; }
  Index fields_per_element() const { return 3 * p_ * p_; }

  Index num_fields() const { return fields_per_element() * num_elements_; }
  Index num_traces() const { return num_vertices_ + (p_ - 1) * num_edges_; }
  Index num_fluxes() const { return p_ * num_interior_edges_; }
  Index size() const { return num_fields() + num_traces() + num_fluxes(); }

  /// component: 0 = p, 1 = u₁, 2 = u₂; local: tensor index j·p + i.
  Index field_dof(Index element, int component, Index local) const {
    return element * fields_per_element() + Index(component) * field_block() + local;
  }
  Index trace_vertex_dof(Index vertex) const { return num_fields() + vertex; }
  Index trace_edge_dof(Index edge, Index k) const {
    return num_fields() + num_vertices_ + edge * (p_ - 1) + (k - 1);
  }
  Index flux_dof(Index interior_edge, Index k) const {
    return num_fields() + num_traces() + interior_edge * p_ + k;
  }

  /// Global p̂ index of edge trace basis k (0 = start vertex, p = end vertex).
  Index edge_trace_dof(const StructuredMesh &mesh, Index edge, Index k) const;

  bool is_field(Index dof) const { return dof < num_fields(); }
  bool is_trace(Index dof) const { return dof >= num_fields() && dof < num_fields() + num_traces(); }
  bool is_flux(Index dof) const { return dof >= num_fields() + num_traces(); }

  const ElementTrialMap &element_map(Index element) const { return maps_.at(std::size_t(element)); }

  /// p̂ unknowns whose basis function touches ∂Ω.
  std::vector<bool> boundary_trace_mask(const StructuredMesh &mesh) const;

private:
  Index p_;
  Index num_elements_;
  Index num_vertices_;
  Index num_edges_;
  Index num_interior_edges_;
  std::vector<ElementTrialMap> maps_;
};

/// Broken enriched test space: q and each component of v in the full tensor
/// space Q_{p+dp} on every element, no inter-element coupling.
class TestDofLayout {
public:
  TestDofLayout(const StructuredMesh &mesh, Index p, Index dp);

  Index order() const { return order_; }
  Index block() const { return (order_ + 1) * (order_ + 1); }
  Index per_element() const { return 3 * block(); }
  Index offset(Index element) const { return element * per_element(); }
  Index size() const { return per_element() * num_elements_; }

private:
  Index order_;
  Index num_elements_;
};

inline TrialDofLayout build_trial_layout(const StructuredMesh &mesh, Index p) { return {mesh, p}; }
inline TestDofLayout build_test_layout(const StructuredMesh &mesh, Index p, Index dp) { return {mesh, p, dp}; }

} // namespace dpg
