#include <doctest.h>

#include "dpgstar/mesh.hpp"
#include "dpgstar/types.hpp"

using namespace dpg;

TEST_CASE("edge counts") {
  struct Case {
    Index n, elements, edges, boundary, interior;
  };
  for (const Case c : {Case{1, 1, 4, 4, 0}, Case{2, 4, 12, 8, 4}, Case{10, 100, 220, 40, 180}}) {
    const StructuredMesh m(c.n, c.n);
    CHECK(m.num_elements() == c.elements);
    CHECK(m.num_edges() == c.edges);
    CHECK(m.num_boundary_edges() == c.boundary);
    CHECK(m.num_interior_edges() == c.interior);
  }
  const StructuredMesh r(3, 2);
  CHECK(r.num_edges() == 3 * 3 + 4 * 2);
  CHECK(r.num_vertices() == 12);
}

TEST_CASE("invalid sizes") {
  CHECK_THROWS_AS(StructuredMesh(0, 2), ValidationError);
  CHECK_THROWS_AS(StructuredMesh(2, -1), ValidationError);
}

TEST_CASE("single element signs are all outward") {
  const StructuredMesh m(1, 1);
  for (const auto &s : m.element_edges(0)) {
    CHECK(s.sign == 1);
    CHECK(m.edge(s.edge).is_boundary);
    CHECK(m.edge(s.edge).normal.dot(outward_normal(s.side)) == doctest::Approx(1.0));
  }
}

TEST_CASE("shared vertical edge on a 2x2 mesh") {
  const StructuredMesh m(2, 2);
  const auto left = m.element_edges(0);
  const auto right = m.element_edges(1);
  const Index shared = left[int(Side::right)].edge;
  CHECK(shared == right[int(Side::left)].edge);
  CHECK(m.edge(shared).normal.x() == 1.0);
  CHECK(left[int(Side::right)].sign == 1);
  CHECK(right[int(Side::left)].sign == -1);
  CHECK_FALSE(m.edge(shared).is_boundary);
  CHECK(m.interior_index(shared) >= 0);
}

TEST_CASE("signed constant pairing cancels on interior edges") {
  const StructuredMesh m(3, 3);
  for (Index e = 0; e < m.num_edges(); ++e) {
    const Edge &edge = m.edge(e);
    if (edge.is_boundary) {
      CHECK(edge.adjacent_count == 1);
      continue;
    }
    CHECK(edge.adjacent_count == 2);
    double total = 0.0;
    for (int k = 0; k < 2; ++k) {
      const auto &adj = edge.adjacent[std::size_t(k)];
      total += adj.sign * edge.length();
      CHECK(double(adj.sign) * edge.normal.dot(outward_normal(adj.side)) == doctest::Approx(1.0));
    }
    CHECK(total == 0.0);
  }
}

TEST_CASE("boundary normals point outward") {
  const StructuredMesh m(4, 3);
  const Point center(0.5, 0.5);
  for (const auto &edge : m.edges())
    if (edge.is_boundary) CHECK(edge.normal.dot(0.5 * (edge.start + edge.end) - center) > 0.0);
}

TEST_CASE("locate and element geometry") {
  const StructuredMesh m(4, 2);
  const Element &el = m.element(m.locate(Point(0.6, 0.7)));
  CHECK(el.lower.x() == doctest::Approx(0.5));
  CHECK(el.lower.y() == doctest::Approx(0.5));
  CHECK(el.hx() == doctest::Approx(0.25));
  CHECK(m.locate(Point(1.0, 1.0)) == m.num_elements() - 1);
  CHECK(m.locate(Point(0.0, 0.0)) == 0);
  CHECK(m == StructuredMesh(4, 2));
  CHECK_FALSE(m == StructuredMesh(2, 4));
}
