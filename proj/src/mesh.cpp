#include "qgfv/mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

namespace qgfv {

void MeshTables::apply_sign_conventions() {
  const std::size_t ne = d_e.size();
  cell_signs.assign(ne, {1, -1});
  vertex_signs.assign(ne, {1, -1});
}

namespace {

template <class Value>
void build_csr(std::size_t rows, const std::vector<std::pair<Index, std::pair<Index, Value>>>& entries,
               std::vector<std::size_t>& off, std::vector<Index>& idx, std::vector<Value>& val) {
  off.assign(rows + 1, 0);
  for (const auto& [r, _] : entries) ++off[r + 1];
  std::partial_sum(off.begin(), off.end(), off.begin());
  idx.resize(entries.size());
  val.resize(entries.size());
  std::vector<std::size_t> cursor(off.begin(), off.end() - 1);
  for (const auto& [r, cv] : entries) {
    idx[cursor[r]] = cv.first;
    val[cursor[r]] = cv.second;
    ++cursor[r];
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw MeshError(what);
}

}  // namespace

PrimalDualMesh::PrimalDualMesh(MeshTables tables) : t_(std::move(tables)) {
  const std::size_t nc = t_.cell_centers.size();
  const std::size_t nv = t_.vertex_positions.size();
  const std::size_t ne = t_.d_e.size();

  require(t_.cell_areas.size() == nc && t_.cell_class.size() == nc, "cell tables have mismatched lengths");
  require(t_.vertex_areas.size() == nv, "vertex tables have mismatched lengths");
  require(t_.l_e.size() == ne && t_.normals.size() == ne && t_.cells_on_edge.size() == ne &&
              t_.vertices_on_edge.size() == ne && t_.edge_class.size() == ne,
          "edge tables have mismatched lengths");
  if (t_.cell_signs.size() != ne || t_.vertex_signs.size() != ne) t_.apply_sign_conventions();

  auto in_range = [](Index i, std::size_t n) { return i >= 0 && static_cast<std::size_t>(i) < n; };
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& ce = t_.cells_on_edge[e];
    const auto& ve = t_.vertices_on_edge[e];
    require(in_range(ce[0], nc), "edge " + std::to_string(e) + ": first cell out of range");
    require(ce[1] == kNoIndex || in_range(ce[1], nc), "edge " + std::to_string(e) + ": second cell out of range");
    require(in_range(ve[0], nv), "edge " + std::to_string(e) + ": first vertex out of range");
    require(ve[1] == kNoIndex || in_range(ve[1], nv), "edge " + std::to_string(e) + ": second vertex out of range");
  }
  for (const auto& k : t_.kites) {
    require(in_range(k.cell, nc) && in_range(k.vertex, nv), "kite index out of range");
  }

  diamond_areas_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) diamond_areas_[e] = 0.5 * t_.d_e[e] * t_.l_e[e];

  n_boundary_cells_ = static_cast<std::size_t>(
      std::count(t_.cell_class.begin(), t_.cell_class.end(), CellClass::Boundary));
  n_boundary_edges_ = static_cast<std::size_t>(
      std::count(t_.edge_class.begin(), t_.edge_class.end(), EdgeClass::Boundary));
  h_ = ne == 0 ? 0.0 : std::accumulate(t_.d_e.begin(), t_.d_e.end(), 0.0) / static_cast<double>(ne);

  std::vector<std::pair<Index, std::pair<Index, double>>> ec, ev, vc, cv;
  for (std::size_t e = 0; e < ne; ++e) {
    const Index ei = static_cast<Index>(e);
    for (int k = 0; k < 2; ++k) {
      if (t_.cells_on_edge[e][k] != kNoIndex)
        ec.push_back({t_.cells_on_edge[e][k], {ei, static_cast<double>(t_.cell_signs[e][k])}});
      if (t_.vertices_on_edge[e][k] != kNoIndex)
        ev.push_back({t_.vertices_on_edge[e][k], {ei, static_cast<double>(t_.vertex_signs[e][k])}});
    }
  }
  for (const auto& k : t_.kites) {
    vc.push_back({k.cell, {k.vertex, k.area}});
    cv.push_back({k.vertex, {k.cell, k.area}});
  }
  build_csr(nc, ec, ec_off_, ec_idx_, ec_sign_);
  build_csr(nv, ev, ev_off_, ev_idx_, ev_sign_);
  build_csr(nc, vc, vc_off_, vc_idx_, vc_area_);
  build_csr(nv, cv, cv_off_, cv_idx_, cv_area_);
}

double PrimalDualMesh::total_area() const {
  return std::accumulate(t_.cell_areas.begin(), t_.cell_areas.end(), 0.0);
}

PrimalDualMesh build_from_dual(std::span<const Vec2> centers, const std::vector<bool>& on_boundary,
                               std::span<const DualPolygon> polygons) {
  require(centers.size() == on_boundary.size(), "centers and boundary flags differ in length");
  const std::size_t nc = centers.size();
  MeshTables t;
  t.cell_centers.assign(centers.begin(), centers.end());
  t.vertex_positions.reserve(polygons.size());

  // key: unordered cell pair -> edge index
  std::map<std::pair<Index, Index>, Index> edge_of;
  for (std::size_t p = 0; p < polygons.size(); ++p) {
    const auto& poly = polygons[p];
    require(poly.corners.size() >= 3, "dual polygon with fewer than three corners");
    t.vertex_positions.push_back(poly.center);
    const std::size_t m = poly.corners.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Index a = poly.corners[k];
      const Index b = poly.corners[(k + 1) % m];
      require(a >= 0 && static_cast<std::size_t>(a) < nc && b >= 0 && static_cast<std::size_t>(b) < nc,
              "dual polygon corner out of range");
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        // The polygon lies left of a->b; store the edge as b->a so it lies on
        // the -t side and becomes vertex 0.
        edge_of.emplace(key, static_cast<Index>(t.cells_on_edge.size()));
        t.cells_on_edge.push_back({b, a});
        t.vertices_on_edge.push_back({static_cast<Index>(p), kNoIndex});
      } else {
        auto& ce = t.cells_on_edge[it->second];
        auto& ve = t.vertices_on_edge[it->second];
        require(ve[1] == kNoIndex, "edge shared by more than two dual polygons");
        require(ce[0] == a && ce[1] == b, "adjacent dual polygons have inconsistent orientation");
        ve[1] = static_cast<Index>(p);
      }
    }
  }

  const std::size_t ne = t.cells_on_edge.size();
  t.d_e.resize(ne);
  t.l_e.resize(ne);
  t.normals.resize(ne);
  t.edge_class.resize(ne);
  t.apply_sign_conventions();

  std::map<std::pair<Index, Index>, double> kite_area;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto [c0, c1] = t.cells_on_edge[e];
    const Vec2 x0 = centers[c0];
    const Vec2 x1 = centers[c1];
    const Vec2 dx = x1 - x0;
    const double d = norm(dx);
    require(d > 0.0, "coincident primal centers on edge " + std::to_string(e));
    const Vec2 n = (1.0 / d) * dx;
    const Vec2 tan = rotate_left(n);
    const Vec2 mid = 0.5 * (x0 + x1);
    t.d_e[e] = d;
    t.normals[e] = n;
    const bool boundary = t.vertices_on_edge[e][1] == kNoIndex;
    if (boundary) {
      require(on_boundary[c0] && on_boundary[c1],
              "edge " + std::to_string(e) + " lies on the hull but joins a non-boundary cell");
    }
    t.edge_class[e] = boundary ? EdgeClass::Boundary : EdgeClass::Interior;

    double l = 0.0;
    for (int k = 0; k < 2; ++k) {
      const Index v = t.vertices_on_edge[e][k];
      if (v == kNoIndex) continue;
      // signed leg from the vertex to the edge-pair intersection, positive when
      // the vertex sits on the side t_{e,v} says it does
      const double leg = t.vertex_signs[e][k] * dot(mid - t.vertex_positions[v], tan);
      l += leg;
      kite_area[{c0, v}] += 0.25 * d * leg;
      kite_area[{c1, v}] += 0.25 * d * leg;
    }
    t.l_e[e] = l;
  }

  t.cell_areas.assign(nc, 0.0);
  t.vertex_areas.assign(polygons.size(), 0.0);
  t.kites.reserve(kite_area.size());
  for (const auto& [key, area] : kite_area) {
    t.kites.push_back({key.first, key.second, area});
    t.cell_areas[key.first] += area;
    t.vertex_areas[key.second] += area;
  }

  t.cell_class.assign(nc, CellClass::Interior);
  for (std::size_t i = 0; i < nc; ++i)
    if (on_boundary[i]) t.cell_class[i] = CellClass::Boundary;
  for (std::size_t e = 0; e < ne; ++e) {
    const auto [c0, c1] = t.cells_on_edge[e];
    if (on_boundary[c0] && !on_boundary[c1]) t.cell_class[c1] = CellClass::BoundaryAdjacent;
    if (on_boundary[c1] && !on_boundary[c0]) t.cell_class[c0] = CellClass::BoundaryAdjacent;
  }
  return PrimalDualMesh(std::move(t));
}

PrimalDualMesh build_quad_mesh(int nx, int ny, double Lx, double Ly) {
  if (nx < 2 || ny < 2) throw MeshError("build_quad_mesh: nx and ny must be at least 2");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw MeshError("build_quad_mesh: Lx and Ly must be positive");

  const auto id = [nx](int i, int j) { return static_cast<Index>(i + j * (nx + 1)); };
  std::vector<Vec2> centers;
  std::vector<bool> boundary;
  centers.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      centers.push_back({Lx * i / nx, Ly * j / ny});
      boundary.push_back(i == 0 || i == nx || j == 0 || j == ny);
    }
  }
  std::vector<DualPolygon> polys;
  polys.reserve(static_cast<std::size_t>(nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      DualPolygon p;
      p.corners = {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
      p.center = {0.5 * (centers[id(i, j)].x + centers[id(i + 1, j)].x),
                  0.5 * (centers[id(i, j)].y + centers[id(i, j + 1)].y)};
      polys.push_back(std::move(p));
    }
  }
  return build_from_dual(centers, boundary, polys);
}

}  // namespace qgfv
