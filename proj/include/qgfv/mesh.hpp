#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qgfv/types.hpp"

namespace qgfv {

/// IC cells not touching the boundary, BC cells sliced by the boundary, and the
/// BC1 ring of interior cells sharing an edge with a BC cell. BC1 is a subset of IC.
enum class CellClass : std::uint8_t { Interior, Boundary, BoundaryAdjacent };
enum class EdgeClass : std::uint8_t { Interior, Boundary };

struct Kite {
  Index cell = kNoIndex;
  Index vertex = kNoIndex;
  double area = 0.0;
};

/// Flat tables describing a primal-dual mesh. These are what the mesh file stores
/// (plus the direction indicators, which the file encodes through row order).
///
/// Orientation conventions:
///   - normals[e] points from cells_on_edge[e][0] to cells_on_edge[e][1], so
///     n_{e,c0} = +1 and n_{e,c1} = -1;
///   - t_e = k x n_e points away from vertices_on_edge[e][0] and towards
///     vertices_on_edge[e][1], so t_{e,v0} = +1 and t_{e,v1} = -1.
struct MeshTables {
  std::vector<Vec2> cell_centers;
  std::vector<double> cell_areas;
  std::vector<CellClass> cell_class;

  std::vector<Vec2> vertex_positions;
  std::vector<double> vertex_areas;

  std::vector<double> d_e;
  std::vector<double> l_e;
  std::vector<Vec2> normals;
  std::vector<std::array<Index, 2>> cells_on_edge;
  std::vector<std::array<Index, 2>> vertices_on_edge;  // second entry kNoIndex on boundary edges
  std::vector<EdgeClass> edge_class;
  std::vector<std::array<std::int8_t, 2>> cell_signs;    // n_{e,i}
  std::vector<std::array<std::int8_t, 2>> vertex_signs;  // t_{e,nu}

  std::vector<Kite> kites;

  /// Fills cell_signs / vertex_signs from the orientation conventions above.
  void apply_sign_conventions();
};

/// Immutable orthogonal primal-dual mesh with derived connectivity (EC, VC, CV, EV)
/// in compressed-row form. Safe for concurrent reads.
class PrimalDualMesh {
 public:
  PrimalDualMesh() = default;
  /// Derives adjacency from the tables. Throws MeshError on out-of-range indices
  /// or mismatched table lengths.
  explicit PrimalDualMesh(MeshTables tables);

  const MeshTables& tables() const { return t_; }

  std::size_t num_cells() const { return t_.cell_centers.size(); }
  std::size_t num_vertices() const { return t_.vertex_positions.size(); }
  std::size_t num_edges() const { return t_.d_e.size(); }
  std::size_t num_boundary_cells() const { return n_boundary_cells_; }
  std::size_t num_interior_cells() const { return num_cells() - n_boundary_cells_; }
  std::size_t num_boundary_edges() const { return n_boundary_edges_; }
  std::size_t num_interior_edges() const { return num_edges() - n_boundary_edges_; }

  Vec2 cell_center(Index i) const { return t_.cell_centers[i]; }
  double cell_area(Index i) const { return t_.cell_areas[i]; }
  CellClass cell_class(Index i) const { return t_.cell_class[i]; }
  bool is_boundary_cell(Index i) const { return t_.cell_class[i] == CellClass::Boundary; }
  bool is_bc1_cell(Index i) const { return t_.cell_class[i] == CellClass::BoundaryAdjacent; }

  Vec2 vertex_position(Index v) const { return t_.vertex_positions[v]; }
  double vertex_area(Index v) const { return t_.vertex_areas[v]; }

  double d(Index e) const { return t_.d_e[e]; }
  double l(Index e) const { return t_.l_e[e]; }
  double diamond_area(Index e) const { return diamond_areas_[e]; }
  Vec2 normal(Index e) const { return t_.normals[e]; }
  Vec2 tangent(Index e) const { return rotate_left(t_.normals[e]); }
  const std::array<Index, 2>& cells(Index e) const { return t_.cells_on_edge[e]; }
  const std::array<Index, 2>& vertices(Index e) const { return t_.vertices_on_edge[e]; }
  int cell_sign(Index e, int k) const { return t_.cell_signs[e][k]; }
  int vertex_sign(Index e, int k) const { return t_.vertex_signs[e][k]; }
  bool is_boundary_edge(Index e) const { return t_.edge_class[e] == EdgeClass::Boundary; }
  std::size_t vertex_count(Index e) const { return t_.vertices_on_edge[e][1] == kNoIndex ? 1 : 2; }

  // EC(i) with n_{e,i}
  std::span<const Index> edges_on_cell(Index i) const { return row(ec_off_, ec_idx_, i); }
  std::span<const double> edge_signs_on_cell(Index i) const { return row(ec_off_, ec_sign_, i); }
  // VC(i) with kite areas |A_{i,nu}|
  std::span<const Index> vertices_on_cell(Index i) const { return row(vc_off_, vc_idx_, i); }
  std::span<const double> kite_areas_on_cell(Index i) const { return row(vc_off_, vc_area_, i); }
  // CV(nu) with kite areas
  std::span<const Index> cells_on_vertex(Index v) const { return row(cv_off_, cv_idx_, v); }
  std::span<const double> kite_areas_on_vertex(Index v) const { return row(cv_off_, cv_area_, v); }
  // EV(nu) with t_{e,nu}
  std::span<const Index> edges_on_vertex(Index v) const { return row(ev_off_, ev_idx_, v); }
  std::span<const double> edge_signs_on_vertex(Index v) const { return row(ev_off_, ev_sign_, v); }

  /// Mean dual-edge length, used as the mesh size h.
  double mesh_size() const { return h_; }
  double total_area() const;

 private:
  template <class T>
  static std::span<const T> row(const std::vector<std::size_t>& off, const std::vector<T>& data,
                                Index i) {
    return {data.data() + off[i], off[i + 1] - off[i]};
  }

  MeshTables t_;
  std::vector<double> diamond_areas_;
  std::size_t n_boundary_cells_ = 0;
  std::size_t n_boundary_edges_ = 0;
  double h_ = 0.0;

  std::vector<std::size_t> ec_off_, vc_off_, cv_off_, ev_off_;
  std::vector<Index> ec_idx_, vc_idx_, cv_idx_, ev_idx_;
  std::vector<double> ec_sign_, vc_area_, cv_area_, ev_sign_;
};

/// A dual cell given as a counter-clockwise loop of primal cell indices, with its
/// center (the primal vertex) already placed.
struct DualPolygon {
  std::vector<Index> corners;
  Vec2 center;
};

/// Builds a complete mesh from primal centers and the dual tessellation. Edges,
/// signs, lengths, kite/cell/vertex areas and classes are all derived here, so
/// the partition-of-area identities hold by construction.
PrimalDualMesh build_from_dual(std::span<const Vec2> centers, const std::vector<bool>& on_boundary,
                               std::span<const DualPolygon> polygons);

/// Structured mesh with primal centers at ((i/nx) Lx, (j/ny) Ly), i=0..nx, j=0..ny.
PrimalDualMesh build_quad_mesh(int nx, int ny, double Lx, double Ly);

struct ValidationReport {
  bool euler_ok = false;
  bool topology_ok = false;
  bool sign_consistency_ok = false;
  bool area_partition_ok = false;
  double max_orthogonality_deviation = 0.0;  // radians
  double max_bisection_offset_ratio = 0.0;
  double min_edge_length_ratio = 0.0;  // min(l_e, d_e) / h
  double max_edge_length_ratio = 0.0;  // max(l_e, d_e) / h
  double max_area_partition_error = 0.0;  // relative
  std::size_t non_convex_diamonds = 0;
  std::vector<Index> offending_edges;
  std::vector<Index> offending_cells;
  std::vector<Index> offending_vertices;
  double orthogonality_tolerance = 1e-8;

  bool accepted() const;
};

enum class MeshKind { Structured, Cvt };

/// Checks topology, orientation and geometry. Never throws on a structurally
/// complete mesh; failures are carried in the report.
ValidationReport validate_mesh(const PrimalDualMesh& mesh, MeshKind kind = MeshKind::Structured);
std::string format_report(const ValidationReport& report);

void write_mesh(std::ostream& os, const PrimalDualMesh& mesh);
PrimalDualMesh read_mesh(std::istream& is);
void save_mesh(const PrimalDualMesh& mesh, const std::filesystem::path& path);
PrimalDualMesh load_mesh(const std::filesystem::path& path);

/// FNV-1a over the serialized mesh.
std::uint64_t mesh_checksum(const PrimalDualMesh& mesh);

}  // namespace qgfv
