#include "dpgstar/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpg {

Point outward_normal(Side side) {
  switch (side) {
  case Side::bottom: return {0.0, -1.0};
  case Side::right: return {1.0, 0.0};
  case Side::top: return {0.0, 1.0};
  case Side::left: return {-1.0, 0.0};
  }
  return {0.0, 0.0};
}

StructuredMesh::StructuredMesh(Index nx, Index ny) : nx_(nx), ny_(ny) {
  if (nx < 1 || ny < 1)
    throw ValidationError("mesh: element counts must be positive (got " + std::to_string(nx) + " x " +
                          std::to_string(ny) + ")");

  const double hx = 1.0 / double(nx), hy = 1.0 / double(ny);
  auto vid = [&](Index i, Index j) { return j * (nx + 1) + i; };

  vertices_.reserve(std::size_t((nx + 1) * (ny + 1)));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i) vertices_.emplace_back(double(i) * hx, double(j) * hy);
  // exact unit-square corners regardless of rounding in i*h
  for (Index j = 0; j <= ny; ++j) vertices_[std::size_t(vid(nx, j))].x() = 1.0;
  for (Index i = 0; i <= nx; ++i) vertices_[std::size_t(vid(i, ny))].y() = 1.0;

  edges_.resize(std::size_t(2 * nx * ny + nx + ny));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      Edge &e = edges_[std::size_t(horizontal_edge(i, j))];
      e.start_vertex = vid(i, j);
      e.end_vertex = vid(i + 1, j);
      e.is_boundary = (j == 0 || j == ny);
      e.normal = (j == 0) ? Point(0.0, -1.0) : Point(0.0, 1.0);
    }
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i <= nx; ++i) {
      Edge &e = edges_[std::size_t(vertical_edge(i, j))];
      e.start_vertex = vid(i, j);
      e.end_vertex = vid(i, j + 1);
      e.is_boundary = (i == 0 || i == nx);
      e.normal = (i == 0) ? Point(-1.0, 0.0) : Point(1.0, 0.0);
    }
  for (auto &e : edges_) {
    e.start = vertices_[std::size_t(e.start_vertex)];
    e.end = vertices_[std::size_t(e.end_vertex)];
  }

  elements_.resize(std::size_t(nx * ny));
  element_sides_.resize(elements_.size());
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      const Index id = j * nx + i;
      Element &el = elements_[std::size_t(id)];
      el.vertices = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      el.lower = vertices_[std::size_t(el.vertices[0])];
      el.upper = vertices_[std::size_t(el.vertices[2])];

      const std::array<Index, 4> side_edges = {horizontal_edge(i, j), vertical_edge(i + 1, j),
                                               horizontal_edge(i, j + 1), vertical_edge(i, j)};
      for (int s = 0; s < 4; ++s) {
        const Side side = static_cast<Side>(s);
        Edge &e = edges_[std::size_t(side_edges[std::size_t(s)])];
        const int sign = outward_normal(side).dot(e.normal) > 0.0 ? 1 : -1;
        e.adjacent[std::size_t(e.adjacent_count++)] = {id, side, sign};
        element_sides_[std::size_t(id)][std::size_t(s)] = {side_edges[std::size_t(s)], side, sign};
      }
    }

  interior_index_.assign(edges_.size(), -1);
  Index next = 0;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (!edges_[e].is_boundary) interior_index_[e] = next++;
}

Index StructuredMesh::num_boundary_edges() const {
  return Index(std::count_if(edges_.begin(), edges_.end(), [](const Edge &e) { return e.is_boundary; }));
}

const Element &StructuredMesh::element(Index e) const {
  if (e < 0 || e >= num_elements()) throw std::out_of_range("mesh: element id " + std::to_string(e));
  return elements_[std::size_t(e)];
}

const Edge &StructuredMesh::edge(Index e) const {
  if (e < 0 || e >= num_edges()) throw std::out_of_range("mesh: edge id " + std::to_string(e));
  return edges_[std::size_t(e)];
}

std::array<ElementSide, 4> StructuredMesh::element_edges(Index element) const {
  if (element < 0 || element >= num_elements())
    throw std::out_of_range("mesh: element id " + std::to_string(element));
  return element_sides_[std::size_t(element)];
}

bool StructuredMesh::vertex_on_boundary(Index v) const {
  const Index i = v % (nx_ + 1), j = v / (nx_ + 1);
  return i == 0 || i == nx_ || j == 0 || j == ny_;
}

Index StructuredMesh::locate(const Point &x) const {
  auto cell = [](double t, Index n) {
    Index k = Index(std::floor(t * double(n)));
    return std::clamp<Index>(k, 0, n - 1);
  };
  return cell(x.y(), ny_) * nx_ + cell(x.x(), nx_);
}

bool StructuredMesh::operator==(const StructuredMesh &other) const {
  if (nx_ != other.nx_ || ny_ != other.ny_) return false;
  if (vertices_ != other.vertices_) return false;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge &a = edges_[e], &b = other.edges_[e];
    if (a.start_vertex != b.start_vertex || a.end_vertex != b.end_vertex || a.normal != b.normal ||
        a.is_boundary != b.is_boundary || a.adjacent_count != b.adjacent_count)
      return false;
    for (int k = 0; k < a.adjacent_count; ++k)
      if (a.adjacent[std::size_t(k)].element != b.adjacent[std::size_t(k)].element ||
          a.adjacent[std::size_t(k)].sign != b.adjacent[std::size_t(k)].sign)
        return false;
  }
  return true;
}

} // namespace dpg
