#include "dpgstar/spaces.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dpg {

namespace {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
std::pair<double, double> legendre_pair(Index n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (Index k = 2; k <= n; ++k) {
    const double p2 = (double(2 * k - 1) * x * p1 - double(k - 1) * p0) / double(k);
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

} // namespace

QuadratureRule gauss_rule(Index n) {
  if (n < 1) throw ValidationError("gauss_rule: need at least one point");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    // ascending order on [-1, 1]
    double x = -std::cos(std::numbers::pi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      auto [pn, pm] = legendre_pair(n, x);
      dp = double(n) * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [pn, pm] = legendre_pair(n, x);
    dp = double(n) * (x * pn - pm) / (x * x - 1.0);
    rule.points(i) = 0.5 * (1.0 + x);
    rule.weights(i) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

VectorXd lobatto_nodes(Index order) {
  if (order < 0) throw ValidationError("lobatto_nodes: negative order");
  VectorXd nodes(order + 1);
  if (order == 0) {
    nodes(0) = 0.5;
    return nodes;
  }
  const Index n = order;
  for (Index i = 0; i <= n; ++i) {
    double x = -std::cos(std::numbers::pi * double(i) / double(n));
    if (i > 0 && i < n) {
      // Newton on (1 − x²) P'_n(x) via x P_n − P_{n−1} = 0 scaled form
      for (int it = 0; it < 100; ++it) {
        auto [pn, pm] = legendre_pair(n, x);
        const double dx = (x * pn - pm) / (double(n + 1) * pn);
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
    }
    nodes(i) = 0.5 * (1.0 + x);
  }
  nodes(0) = 0.0;
  nodes(n) = 1.0;
  return nodes;
}

LagrangeBasis::LagrangeBasis(Index order) : order_(order) {
  if (order < 0) throw ValidationError("LagrangeBasis: negative order " + std::to_string(order));
  nodes_ = lobatto_nodes(order);
  barycentric_.resize(order + 1);
  for (Index j = 0; j <= order; ++j) {
    double prod = 1.0;
    for (Index k = 0; k <= order; ++k)
      if (k != j) prod *= nodes_(j) - nodes_(k);
    barycentric_(j) = 1.0 / prod;
  }
}

BasisValues LagrangeBasis::eval(const VectorXd &points) const {
  const Index m = points.size(), n = size();
  BasisValues out{MatrixXd::Zero(m, n), MatrixXd::Zero(m, n)};
  for (Index r = 0; r < m; ++r) {
    const double x = points(r);
    for (Index j = 0; j < n; ++j) {
      // l_j(x) = w_j Π_{k≠j} (x − x_k),  l_j'(x) = w_j Σ_{i≠j} Π_{k≠i,j} (x − x_k)
      double value = barycentric_(j);
      double deriv = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (i == j) continue;
        double term = barycentric_(j);
        for (Index k = 0; k < n; ++k)
          if (k != j && k != i) term *= x - nodes_(k);
        deriv += term;
        value *= x - nodes_(i);
      }
      out.values(r, j) = value;
      out.derivatives(r, j) = deriv;
    }
  }
  return out;
}

TrialDofLayout::TrialDofLayout(const StructuredMesh &mesh, Index p)
    : p_(p), num_elements_(mesh.num_elements()), num_vertices_(mesh.num_vertices()),
      num_edges_(mesh.num_edges()), num_interior_edges_(mesh.num_interior_edges()) {
  if (p < 1) throw ValidationError("trial layout: order p must be >= 1 (got " + std::to_string(p) + ")");

  maps_.resize(std::size_t(num_elements_));
  for (Index e = 0; e < num_elements_; ++e) {
    ElementTrialMap &map = maps_[std::size_t(e)];
    map.field_count = fields_per_element();
    for (Index k = 0; k < fields_per_element(); ++k) map.global.push_back(field_dof(e, 0, 0) + k);

    const Element &el = mesh.element(e);
    std::array<Index, 4> corner_local{};
    for (int c = 0; c < 4; ++c) {
      corner_local[std::size_t(c)] = map.size();
      map.global.push_back(trace_vertex_dof(el.vertices[std::size_t(c)]));
    }
    // (start corner, end corner) of each side in the edge's own direction
    static constexpr std::array<std::array<int, 2>, 4> ends = {{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};

    const auto sides = mesh.element_edges(e);
    for (int s = 0; s < 4; ++s) {
      auto &trace = map.trace[std::size_t(s)];
      trace.assign(std::size_t(p + 1), -1);
      trace.front() = corner_local[std::size_t(ends[std::size_t(s)][0])];
      trace.back() = corner_local[std::size_t(ends[std::size_t(s)][1])];
      for (Index k = 1; k < p; ++k) {
        trace[std::size_t(k)] = map.size();
        map.global.push_back(trace_edge_dof(sides[std::size_t(s)].edge, k));
      }
    }
    for (int s = 0; s < 4; ++s) {
      const Index ie = mesh.interior_index(sides[std::size_t(s)].edge);
      if (ie < 0) continue;
      auto &flux = map.flux[std::size_t(s)];
      for (Index k = 0; k < p; ++k) {
        flux.push_back(map.size());
        map.global.push_back(flux_dof(ie, k));
      }
    }
  }
}

Index TrialDofLayout::edge_trace_dof(const StructuredMesh &mesh, Index edge, Index k) const {
  const Edge &ed = mesh.edge(edge);
  if (k == 0) return trace_vertex_dof(ed.start_vertex);
  if (k == p_) return trace_vertex_dof(ed.end_vertex);
  return trace_edge_dof(edge, k);
}

std::vector<bool> TrialDofLayout::boundary_trace_mask(const StructuredMesh &mesh) const {
  std::vector<bool> mask(std::size_t(size()), false);
  for (Index v = 0; v < num_vertices_; ++v)
    if (mesh.vertex_on_boundary(v)) mask[std::size_t(trace_vertex_dof(v))] = true;
  for (Index e = 0; e < num_edges_; ++e)
    if (mesh.edge(e).is_boundary)
      for (Index k = 1; k < p_; ++k) mask[std::size_t(trace_edge_dof(e, k))] = true;
  return mask;
}

TestDofLayout::TestDofLayout(const StructuredMesh &mesh, Index p, Index dp)
    : order_(p + dp), num_elements_(mesh.num_elements()) {
  if (p < 1) throw ValidationError("test layout: order p must be >= 1 (got " + std::to_string(p) + ")");
  if (dp < 0) throw ValidationError("test layout: enrichment dp must be >= 0 (got " + std::to_string(dp) + ")");
}

} // namespace dpg
