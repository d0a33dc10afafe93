#include <algorithm>
#include <cmath>
#include <sstream>

#include "qgfv/mesh.hpp"

namespace qgfv {

namespace {

void note(std::vector<Index>& list, Index i) {
  if (list.size() < 64 && std::find(list.begin(), list.end(), i) == list.end()) list.push_back(i);
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

bool ValidationReport::accepted() const {
  return euler_ok && topology_ok && sign_consistency_ok && area_partition_ok &&
         non_convex_diamonds == 0 && max_orthogonality_deviation < orthogonality_tolerance;
}

ValidationReport validate_mesh(const PrimalDualMesh& mesh, MeshKind kind) {
  ValidationReport r;
  r.orthogonality_tolerance = kind == MeshKind::Structured ? 1e-8 : 1e-3;
  const std::size_t nc = mesh.num_cells();
  const std::size_t nv = mesh.num_vertices();
  const std::size_t ne = mesh.num_edges();
  const double h = mesh.mesh_size();
  const double geom_tol = 1e-10 * h;

  r.euler_ok = nc + nv == ne + 1;
  r.topology_ok = true;
  r.sign_consistency_ok = true;
  r.area_partition_ok = true;

  // mean position of the primal centers around each vertex; always strictly on
  // the dual cell's side of any of its edges
  std::vector<Vec2> dual_centroid(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    Vec2 acc{};
    const auto cells = mesh.cells_on_vertex(static_cast<Index>(v));
    for (Index c : cells) acc = acc + mesh.cell_center(c);
    dual_centroid[v] = cells.empty() ? mesh.vertex_position(static_cast<Index>(v))
                                     : (1.0 / static_cast<double>(cells.size())) * acc;
  }

  r.min_edge_length_ratio = ne ? 1e300 : 0.0;
  r.max_edge_length_ratio = 0.0;
  for (std::size_t ei = 0; ei < ne; ++ei) {
    const Index e = static_cast<Index>(ei);
    const auto [c0, c1] = mesh.cells(e);
    const auto [v0, v1] = mesh.vertices(e);
    if (c1 == kNoIndex) {
      // one-cell edges have no defined edge value; not supported
      r.topology_ok = false;
      note(r.offending_edges, e);
      continue;
    }
    const bool boundary = mesh.is_boundary_edge(e);
    if (boundary != (v1 == kNoIndex) ||
        (boundary && !(mesh.is_boundary_cell(c0) && mesh.is_boundary_cell(c1)))) {
      r.topology_ok = false;
      note(r.offending_edges, e);
    }

    const Vec2 x0 = mesh.cell_center(c0);
    const Vec2 x1 = mesh.cell_center(c1);
    const Vec2 n = mesh.normal(e);
    const Vec2 t = mesh.tangent(e);
    const Vec2 mid = 0.5 * (x0 + x1);
    const double d = norm(x1 - x0);

    if (rel_err(d, mesh.d(e)) > 1e-12 || std::abs(norm(n) - 1.0) > 1e-12) {
      r.topology_ok = false;
      note(r.offending_edges, e);
    }

    // n_{e,i}: +1 when n_e points away from cell i, and the pair must cancel
    const int s0 = mesh.cell_sign(e, 0);
    const int s1 = mesh.cell_sign(e, 1);
    const bool n_ok = s0 + s1 == 0 && s0 * dot(mid - x0, n) > 0.0 && s1 * dot(mid - x1, n) > 0.0;
    if (!n_ok) {
      r.sign_consistency_ok = false;
      note(r.offending_edges, e);
    }
    // t_{e,nu}: +1 when t_e points away from the dual cell
    for (int k = 0; k < 2; ++k) {
      const Index v = mesh.vertices(e)[k];
      if (v == kNoIndex) continue;
      const double side = dot(dual_centroid[v] - mid, t);
      if (!(mesh.vertex_sign(e, k) * side < 0.0)) {
        r.sign_consistency_ok = false;
        note(r.offending_edges, e);
      }
    }
    if (v1 != kNoIndex && mesh.vertex_sign(e, 0) + mesh.vertex_sign(e, 1) != 0) {
      r.sign_consistency_ok = false;
      note(r.offending_edges, e);
    }

    // convexity: the edge-pair intersection must fall inside both segments
    bool convex = true;
    for (int k = 0; k < 2; ++k) {
      const Index v = mesh.vertices(e)[k];
      if (v == kNoIndex) continue;
      const double leg = mesh.vertex_sign(e, k) * dot(mid - mesh.vertex_position(v), t);
      if (leg < -geom_tol) convex = false;
    }

    if (v1 != kNoIndex) {
      const Vec2 p0 = mesh.vertex_position(v0);
      const Vec2 p1 = mesh.vertex_position(v1);
      const Vec2 dir = p1 - p0;
      const double len = norm(dir);
      if (len > geom_tol) {
        const double dev = std::asin(std::min(1.0, std::abs(cross(dir, t)) / len));
        r.max_orthogonality_deviation = std::max(r.max_orthogonality_deviation, dev);
        if (dev >= r.orthogonality_tolerance) note(r.offending_edges, e);
        // intersection of the primal edge line with the dual edge line
        const double denom = cross(dir, n);
        if (std::abs(denom) > 0.0) {
          const double s = cross(p0 - x0, dir) / -denom;  // x0 + s n lies on the primal line
          if (s < -geom_tol || s > d + geom_tol) convex = false;
          r.max_bisection_offset_ratio = std::max(r.max_bisection_offset_ratio, std::abs(s - 0.5 * d) / h);
        }
      }
    } else {
      const Vec2 p0 = mesh.vertex_position(v0);
      const double offset = std::abs(dot(p0 - mid, n));
      r.max_bisection_offset_ratio = std::max(r.max_bisection_offset_ratio, offset / h);
    }
    if (!convex) {
      ++r.non_convex_diamonds;
      note(r.offending_edges, e);
    }

    const double lo = std::min(mesh.l(e), mesh.d(e)) / h;
    const double hi = std::max(mesh.l(e), mesh.d(e)) / h;
    r.min_edge_length_ratio = std::min(r.min_edge_length_ratio, lo);
    r.max_edge_length_ratio = std::max(r.max_edge_length_ratio, hi);

    if (mesh.diamond_area(e) != 0.5 * mesh.d(e) * mesh.l(e)) {
      r.area_partition_ok = false;
      note(r.offending_edges, e);
    }
  }

  // area partitions
  double max_err = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    double s = 0.0;
    for (double a : mesh.kite_areas_on_cell(static_cast<Index>(i))) s += a;
    const double err = rel_err(s, mesh.cell_area(static_cast<Index>(i)));
    if (err > 1e-12 || !(mesh.cell_area(static_cast<Index>(i)) > 0.0)) note(r.offending_cells, static_cast<Index>(i));
    max_err = std::max(max_err, err);
  }
  for (std::size_t v = 0; v < nv; ++v) {
    double s = 0.0;
    for (double a : mesh.kite_areas_on_vertex(static_cast<Index>(v))) s += a;
    const double err = rel_err(s, mesh.vertex_area(static_cast<Index>(v)));
    if (err > 1e-12 || !(mesh.vertex_area(static_cast<Index>(v)) > 0.0))
      note(r.offending_vertices, static_cast<Index>(v));
    max_err = std::max(max_err, err);
  }
  double cells = 0.0, verts = 0.0, diamonds = 0.0;
  for (std::size_t i = 0; i < nc; ++i) cells += mesh.cell_area(static_cast<Index>(i));
  for (std::size_t v = 0; v < nv; ++v) verts += mesh.vertex_area(static_cast<Index>(v));
  for (std::size_t e = 0; e < ne; ++e) diamonds += mesh.diamond_area(static_cast<Index>(e));
  max_err = std::max({max_err, rel_err(cells, verts), rel_err(cells, diamonds)});
  r.max_area_partition_error = max_err;
  r.area_partition_ok = r.area_partition_ok && max_err <= 1e-12 && r.offending_cells.empty() &&
                        r.offending_vertices.empty();
  return r;
}

std::string format_report(const ValidationReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "accepted: " << (r.accepted() ? "yes" : "no") << '\n'
     << "euler_ok: " << (r.euler_ok ? "yes" : "no") << '\n'
     << "topology_ok: " << (r.topology_ok ? "yes" : "no") << '\n'
     << "sign_consistency_ok: " << (r.sign_consistency_ok ? "yes" : "no") << '\n'
     << "area_partition_ok: " << (r.area_partition_ok ? "yes" : "no") << '\n'
     << "max_area_partition_error: " << r.max_area_partition_error << '\n'
     << "max_orthogonality_deviation: " << r.max_orthogonality_deviation << " rad (tolerance "
     << r.orthogonality_tolerance << ")\n"
     << "max_bisection_offset_ratio: " << r.max_bisection_offset_ratio << '\n'
     << "edge_length_ratio: [" << r.min_edge_length_ratio << ", " << r.max_edge_length_ratio << "]\n"
     << "non_convex_diamonds: " << r.non_convex_diamonds << '\n';
  auto list = [&os](const char* name, const std::vector<Index>& v) {
    if (v.empty()) return;
    os << name << ':';
    for (Index i : v) os << ' ' << i + 1;
    os << '\n';
  };
  list("offending_edges", r.offending_edges);
  list("offending_cells", r.offending_cells);
  list("offending_vertices", r.offending_vertices);
  return os.str();
}

}  // namespace qgfv
