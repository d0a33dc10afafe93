#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qgfv/mesh.hpp"

using namespace qgfv;

namespace {

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("Q2 counts and classes") {
  const auto m = build_quad_mesh(2, 2, 1.0, 1.0);
  CHECK(m.num_cells() == 9);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_edges() == 12);
  CHECK(m.num_boundary_edges() == 8);
  CHECK(m.num_interior_edges() == 4);
  CHECK(m.num_boundary_cells() == 8);
  CHECK(m.cell_class(4) == CellClass::BoundaryAdjacent);
  CHECK(m.num_cells() + m.num_vertices() == m.num_edges() + 1);
}

TEST_CASE("Q2 areas") {
  const auto m = build_quad_mesh(2, 2, 1.0, 1.0);
  CHECK(m.cell_area(4) == 0.25);
  for (Index i : {1, 3, 5, 7}) CHECK(m.cell_area(i) == 0.125);
  for (Index i : {0, 2, 6, 8}) CHECK(m.cell_area(i) == 0.0625);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-15));
  double diamonds = 0.0, verts = 0.0;
  for (std::size_t e = 0; e < m.num_edges(); ++e) diamonds += m.diamond_area(static_cast<Index>(e));
  for (std::size_t v = 0; v < m.num_vertices(); ++v) verts += m.vertex_area(static_cast<Index>(v));
  CHECK(diamonds == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(verts == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t v = 0; v < m.num_vertices(); ++v) CHECK(m.vertex_area(static_cast<Index>(v)) == 0.25);
}

TEST_CASE("Q2 boundary edge geometry") {
  const auto m = build_quad_mesh(2, 2, 1.0, 1.0);
  int seen = 0;
  for (std::size_t ei = 0; ei < m.num_edges(); ++ei) {
    const Index e = static_cast<Index>(ei);
    if (!m.is_boundary_edge(e)) continue;
    ++seen;
    CHECK(m.vertex_count(e) == 1);
    CHECK(m.l(e) == 0.25);
    CHECK(m.d(e) == 0.5);
    CHECK(m.diamond_area(e) == 0.0625);
  }
  CHECK(seen == 8);
}

TEST_CASE("Q2 validates cleanly") {
  const auto r = validate_mesh(build_quad_mesh(2, 2, 1.0, 1.0));
  CHECK(r.accepted());
  CHECK(r.euler_ok);
  CHECK(r.max_orthogonality_deviation == 0.0);
  CHECK(r.non_convex_diamonds == 0);
  CHECK(r.max_area_partition_error <= 1e-12);
}

TEST_CASE("flipped normal indicator is reported") {
  auto t = build_quad_mesh(2, 2, 1.0, 1.0).tables();
  t.cell_signs[3][0] = -1;
  const auto r = validate_mesh(PrimalDualMesh(std::move(t)));
  CHECK_FALSE(r.sign_consistency_ok);
  CHECK_FALSE(r.accepted());
  REQUIRE_FALSE(r.offending_edges.empty());
  CHECK(r.offending_edges.front() == 3);
}

TEST_CASE("rectangular quad meshes satisfy the mesh invariants") {
  for (auto [nx, ny, Lx, Ly] : {std::tuple{3, 5, 2.0, 7.0}, std::tuple{8, 8, 1.0, 1.0}, std::tuple{16, 9, 3.3e6, 1.1e6}}) {
    const auto m = build_quad_mesh(nx, ny, Lx, Ly);
    const auto r = validate_mesh(m);
    CHECK(r.accepted());
    CHECK(m.total_area() == doctest::Approx(Lx * Ly).epsilon(1e-12));
    for (std::size_t ei = 0; ei < m.num_edges(); ++ei) {
      const Index e = static_cast<Index>(ei);
      CHECK(m.diamond_area(e) == 0.5 * m.d(e) * m.l(e));
      if (!m.is_boundary_edge(e)) CHECK(m.cell_sign(e, 0) + m.cell_sign(e, 1) == 0);
    }
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
      const Index vi = static_cast<Index>(v);
      CHECK(sum(m.kite_areas_on_vertex(vi)) == doctest::Approx(m.vertex_area(vi)).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < m.num_cells(); ++i) {
      const Index ci = static_cast<Index>(i);
      CHECK(sum(m.kite_areas_on_cell(ci)) == doctest::Approx(m.cell_area(ci)).epsilon(1e-12));
    }
  }
}

TEST_CASE("BC1 is edge adjacency to the boundary") {
  const auto m = build_quad_mesh(4, 4, 1.0, 1.0);
  // centers (i, j) with i, j in 1..3 are interior; all of them touch the boundary except (2, 2)
  CHECK(m.cell_class(2 + 2 * 5) == CellClass::Interior);
  CHECK(m.cell_class(1 + 1 * 5) == CellClass::BoundaryAdjacent);
  CHECK(m.cell_class(2 + 1 * 5) == CellClass::BoundaryAdjacent);
}

TEST_CASE("invalid quad dimensions") {
  CHECK_THROWS_AS(build_quad_mesh(1, 4, 1.0, 1.0), MeshError);
  CHECK_THROWS_AS(build_quad_mesh(4, 4, 0.0, 1.0), MeshError);
}

TEST_CASE("round trip through the text format") {
  const auto m = build_quad_mesh(2, 2, 1.0, 1.0);
  std::stringstream ss;
  write_mesh(ss, m);
  const auto back = read_mesh(ss);
  CHECK(back.num_cells() == m.num_cells());
  CHECK(back.num_edges() == m.num_edges());
  CHECK(mesh_checksum(back) == mesh_checksum(m));
  for (std::size_t ei = 0; ei < m.num_edges(); ++ei) {
    const Index e = static_cast<Index>(ei);
    CHECK(back.d(e) == m.d(e));
    CHECK(back.l(e) == m.l(e));
    CHECK(back.cells(e) == m.cells(e));
    CHECK(back.vertices(e) == m.vertices(e));
  }
  CHECK(validate_mesh(back).accepted());
}

TEST_CASE("round trip keeps 15 significant digits on an irrational-size mesh") {
  const auto m = build_quad_mesh(5, 3, std::sqrt(2.0) * 1e6, M_PI * 1e5);
  std::stringstream ss;
  write_mesh(ss, m);
  const auto back = read_mesh(ss);
  for (std::size_t i = 0; i < m.num_cells(); ++i) {
    CHECK(back.cell_area(static_cast<Index>(i)) == m.cell_area(static_cast<Index>(i)));
    CHECK(back.cell_center(static_cast<Index>(i)) == m.cell_center(static_cast<Index>(i)));
  }
}

TEST_CASE("malformed files give structured errors") {
  SUBCASE("empty file") {
    std::istringstream is("");
    CHECK_THROWS_WITH_AS(read_mesh(is), doctest::Contains("empty file"), MeshFormatError);
  }
  SUBCASE("vertex count off by one names the section") {
    std::stringstream ss;
    write_mesh(ss, build_quad_mesh(2, 2, 1.0, 1.0));
    std::string text = ss.str();
    text.replace(text.find("vertices 4"), 10, "vertices 5");
    std::istringstream is(text);
    try {
      read_mesh(is);
      FAIL("expected an error");
    } catch (const MeshFormatError& e) {
      CHECK(e.section() == "vertices");
    }
  }
  SUBCASE("vertex count too small") {
    std::stringstream ss;
    write_mesh(ss, build_quad_mesh(2, 2, 1.0, 1.0));
    std::string text = ss.str();
    text.replace(text.find("vertices 4"), 10, "vertices 3");
    std::istringstream is(text);
    try {
      read_mesh(is);
      FAIL("expected an error");
    } catch (const MeshFormatError& e) {
      CHECK(e.section() == "vertices");
    }
  }
  SUBCASE("index out of range") {
    std::stringstream ss;
    write_mesh(ss, build_quad_mesh(2, 2, 1.0, 1.0));
    std::string text = ss.str();
    const auto kites = text.find("kites ");
    const auto row = text.find('\n', kites) + 1;
    text.replace(row, text.find(' ', row) - row, "99");
    std::istringstream is(text);
    CHECK_THROWS_WITH_AS(read_mesh(is), doctest::Contains("out of range"), MeshFormatError);
  }
  SUBCASE("bad header") {
    std::istringstream is("qgmesh 2\n");
    CHECK_THROWS_AS(read_mesh(is), MeshFormatError);
  }
}
