#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "dpgstar/types.hpp"

namespace dpg {

using Point = Eigen::Vector2d;

enum class Side : int { bottom = 0, right = 1, top = 2, left = 3 };

struct EdgeAdjacency {
  Index element = -1;
  Side side = Side::bottom;
  int sign = 0; // +1 if the element's outward normal equals the edge normal
};

/// Straight mesh edge, parametrized from `start` to `end` (left to right for
/// horizontal edges, bottom to top for vertical ones).
struct Edge {
  Index start_vertex = -1;
  Index end_vertex = -1;
  Point start;
  Point end;
  Point normal; // +x / +y in the interior, outward normal of Ω on the boundary
  std::array<EdgeAdjacency, 2> adjacent{};
  int adjacent_count = 0;
  bool is_boundary = false;

  double length() const { return (end - start).norm(); }
  Point at(double t) const { return start + t * (end - start); }
};

struct Element {
  Point lower; // (x0, y0)
  Point upper; // (x1, y1)
  std::array<Index, 4> vertices{}; // bottom-left, bottom-right, top-right, top-left

  double hx() const { return upper.x() - lower.x(); }
  double hy() const { return upper.y() - lower.y(); }
  Point map(double xi, double eta) const { return {lower.x() + xi * hx(), lower.y() + eta * hy()}; }
};

struct ElementSide {
  Index edge = -1;
  Side side = Side::bottom;
  int sign = 0;
};

/// Uniform nx × ny quadrilateral mesh of the unit square.
///
/// Elements are numbered row-major from the bottom-left corner. Horizontal
/// edges come first (row by row, bottom-up, left to right), followed by the
/// vertical edges in the same order.
class StructuredMesh {
public:
  StructuredMesh(Index nx, Index ny);

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  double hx() const { return 1.0 / double(nx_); }
  double hy() const { return 1.0 / double(ny_); }

  Index num_elements() const { return Index(elements_.size()); }
  Index num_edges() const { return Index(edges_.size()); }
  Index num_vertices() const { return Index(vertices_.size()); }
  Index num_boundary_edges() const;
  Index num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  const Element &element(Index e) const;
  const Edge &edge(Index e) const;
  const Point &vertex(Index v) const { return vertices_.at(std::size_t(v)); }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<Element> &elements() const { return elements_; }

  /// Sides ordered (bottom, right, top, left).
  std::array<ElementSide, 4> element_edges(Index element) const;

  /// Position of an interior edge among the interior edges, or −1 on the boundary.
  Index interior_index(Index edge) const { return interior_index_.at(std::size_t(edge)); }

  bool vertex_on_boundary(Index v) const;

  /// Element containing x (points on shared boundaries go to the upper/right element).
  Index locate(const Point &x) const;

  bool operator==(const StructuredMesh &other) const;

private:
  Index horizontal_edge(Index i, Index j) const { return j * nx_ + i; }
  Index vertical_edge(Index i, Index j) const { return nx_ * (ny_ + 1) + j * (nx_ + 1) + i; }

  Index nx_;
  Index ny_;
  std::vector<Point> vertices_;
  std::vector<Element> elements_;
  std::vector<Edge> edges_;
  std::vector<std::array<ElementSide, 4>> element_sides_;
  std::vector<Index> interior_index_;
};

inline StructuredMesh build_mesh(Index nx, Index ny) { return StructuredMesh(nx, ny); }

/// Outward unit normal of an element side.
Point outward_normal(Side side);

} // namespace dpg
