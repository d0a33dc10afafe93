#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "qgfv/mesh.hpp"

namespace qgfv {

/// Simple polygon, stored counter-clockwise.
struct Polygon {
  std::vector<Vec2> vertices;

  double area() const;
  double perimeter() const;
  bool contains(Vec2 p) const;

  static Polygon rectangle(double Lx, double Ly);
};

/// Reads "x y" rows ('#' comments allowed); clockwise input is reversed.
Polygon read_polygon(std::istream& is);
Polygon load_polygon(const std::filesystem::path& path);

struct CvtOptions {
  int n_generators = 64;
  int lloyd_iterations = 200;
  std::uint64_t seed = 7;
  int max_retries = 8;
};

/// Boundary-conforming centroidal Voronoi mesh. Corners carry a generator and
/// each side gets generators evenly spaced at the hexagonal packing distance;
/// the interior generators follow Lloyd iterations against them. Sides whose
/// generators crowd out the first interior row release one generator inwards.
/// Obtuse Delaunay angles are then pushed below a right angle so every diamond
/// is convex. The dual is the Delaunay triangulation restricted to the polygon.
/// A rejected mesh restarts from a seed derived from `seed`, up to `max_retries`
/// times, so the result depends on the options only. Throws MeshError otherwise.
PrimalDualMesh build_cvt_mesh(const Polygon& domain, const CvtOptions& options);

/// Builds the primal-dual mesh for fixed generators. Cocircular configurations
/// (a Voronoi vertex of degree > 3) and non-conforming triangulations are
/// retried with a small perturbation of the non-boundary generators, up to
/// `max_retries` times; triangles left sharing a circumcentre are merged into
/// one polygonal dual cell.
PrimalDualMesh mesh_from_generators(const Polygon& domain, std::vector<Vec2> generators,
                                    const std::vector<bool>& on_boundary, int max_retries,
                                    std::uint64_t seed);

}  // namespace qgfv
