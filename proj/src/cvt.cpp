#include "qgfv/cvt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/polygon/voronoi.hpp>

namespace qgfv {

double Polygon::area() const {
  double a = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) a += cross(vertices[k], vertices[(k + 1) % vertices.size()]);
  return 0.5 * a;
}

double Polygon::perimeter() const {
  double p = 0.0;
  for (std::size_t k = 0; k < vertices.size(); ++k) p += norm(vertices[(k + 1) % vertices.size()] - vertices[k]);
  return p;
}

bool Polygon::contains(Vec2 p) const {
  bool inside = false;
  const std::size_t m = vertices.size();
  for (std::size_t k = 0, j = m - 1; k < m; j = k++) {
    const Vec2 a = vertices[k];
    const Vec2 b = vertices[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

Polygon Polygon::rectangle(double Lx, double Ly) { return Polygon{{{0.0, 0.0}, {Lx, 0.0}, {Lx, Ly}, {0.0, Ly}}}; }

Polygon read_polygon(std::istream& is) {
  Polygon poly;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    if (!(ss >> x)) continue;
    std::string rest;
    if (!(ss >> y) || (ss >> rest)) throw MeshError("polygon line " + std::to_string(line_no) + ": expected 'x y'");
    poly.vertices.push_back({x, y});
  }
  if (poly.vertices.size() >= 2 && poly.vertices.front() == poly.vertices.back()) poly.vertices.pop_back();
  if (poly.vertices.size() < 3) throw MeshError("polygon needs at least three vertices");
  if (poly.area() < 0.0) std::reverse(poly.vertices.begin(), poly.vertices.end());
  if (!(poly.area() > 0.0)) throw MeshError("polygon has zero area");
  return poly;
}

Polygon load_polygon(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  return read_polygon(is);
}

namespace {

/// Deterministic uniform in [0, 1) independent of the standard library's distributions.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Maps domain coordinates to the integer lattice used by the Voronoi builder.
struct Lattice {
  Vec2 origin;
  double scale = 1.0;

  explicit Lattice(const Polygon& domain) {
    double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
    for (Vec2 p : domain.vertices) {
      xmin = std::min(xmin, p.x);
      ymin = std::min(ymin, p.y);
      xmax = std::max(xmax, p.x);
      ymax = std::max(ymax, p.y);
    }
    origin = {xmin, ymin};
    const double extent = std::max(xmax - xmin, ymax - ymin);
    // power of two keeps snapped coordinates exact for dyadic inputs
    scale = std::ldexp(1.0, 29 - static_cast<int>(std::ceil(std::log2(extent))));
  }

  std::int64_t ix(double x) const { return std::llround((x - origin.x) * scale); }
  std::int64_t iy(double y) const { return std::llround((y - origin.y) * scale); }
  Vec2 snap(Vec2 p) const {
    return {origin.x + static_cast<double>(ix(p.x)) / scale, origin.y + static_cast<double>(iy(p.y)) / scale};
  }
};

using VoronoiDiagram = boost::polygon::voronoi_diagram<double>;
using LatticePoint = boost::polygon::point_data<int>;

void build_voronoi(const Lattice& lat, std::span<const Vec2> gens, VoronoiDiagram& vd) {
  std::vector<LatticePoint> pts;
  pts.reserve(gens.size());
  for (Vec2 g : gens) pts.emplace_back(static_cast<int>(lat.ix(g.x)), static_cast<int>(lat.iy(g.y)));
  vd.clear();
  boost::polygon::construct_voronoi(pts.begin(), pts.end(), &vd);
}

std::vector<std::vector<Index>> voronoi_neighbours(const VoronoiDiagram& vd, std::size_t n) {
  std::vector<std::vector<Index>> nb(n);
  for (const auto& edge : vd.edges()) {
    if (!edge.is_primary()) continue;
    const auto a = static_cast<Index>(edge.cell()->source_index());
    const auto b = static_cast<Index>(edge.twin()->cell()->source_index());
    nb[a].push_back(b);
  }
  for (auto& v : nb) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return nb;
}

/// Sutherland-Hodgman clip against {x : dot(a, x) <= b}.
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, Vec2 a, double b) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 p = poly[k];
    const Vec2 q = poly[(k + 1) % m];
    const double fp = dot(a, p) - b;
    const double fq = dot(a, q) - b;
    if (fp <= 0.0) out.push_back(p);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
  }
  return out;
}

bool polygon_centroid(const std::vector<Vec2>& poly, Vec2 shift, Vec2& centroid) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2 p = poly[k];
    const Vec2 q = poly[(k + 1) % poly.size()];
    const double w = cross(p, q);
    a += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (!(a > 0.0)) return false;
  centroid = Vec2{cx / (3.0 * a), cy / (3.0 * a)} + shift;
  return true;
}

/// Voronoi cell of generator i clipped to the domain, in absolute coordinates.
std::vector<Vec2> clipped_cell(const Polygon& domain, std::span<const Vec2> gens, std::span<const Index> neighbours,
                               std::size_t i) {
  // work relative to the generator to keep the clip well conditioned
  const Vec2 g = gens[i];
  std::vector<Vec2> cell;
  cell.reserve(domain.vertices.size());
  for (Vec2 p : domain.vertices) cell.push_back(p - g);
  for (Index j : neighbours) {
    const Vec2 a = gens[j] - g;
    cell = clip_half_plane(cell, a, 0.5 * dot(a, a));
    if (cell.empty()) break;
  }
  for (auto& p : cell) p = p + g;
  return cell;
}

void lloyd_step(const Polygon& domain, const Lattice& lat, std::vector<Vec2>& gens, const std::vector<bool>& fixed) {
  VoronoiDiagram vd;
  build_voronoi(lat, gens, vd);
  const auto nb = voronoi_neighbours(vd, gens.size());
  std::vector<Vec2> next = gens;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (fixed[i]) continue;
    Vec2 c;
    const auto cell = clipped_cell(domain, gens, nb[i], i);
    if (polygon_centroid(cell, {0.0, 0.0}, c) && domain.contains(c)) next[i] = lat.snap(c);
  }
  gens = std::move(next);
}

// Where a generator sits: free in the interior,
// pinned to a polygon corner, or on polygon side k (k >= 0).
constexpr int kInterior = -2;
constexpr int kCorner = -1;

/// Spreads the generators on each polygon side evenly between its corners,
/// keeping their order.
void respace_sides(const Polygon& domain, const Lattice& lat, std::vector<Vec2>& gens, const std::vector<int>& place) {
  const std::size_t m = domain.vertices.size();
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 a = domain.vertices[k];
    const Vec2 b = domain.vertices[(k + 1) % m];
    std::vector<std::pair<double, std::size_t>> on_side;
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (place[i] == static_cast<int>(k)) on_side.push_back({dot(gens[i] - a, b - a), i});
    std::sort(on_side.begin(), on_side.end());
    const double count = static_cast<double>(on_side.size() + 1);
    for (std::size_t j = 0; j < on_side.size(); ++j)
      gens[on_side[j].second] = lat.snap(a + (static_cast<double>(j + 1) / count) * (b - a));
  }
}

using Triangle = std::array<Index, 3>;

struct Triangulation {
  std::vector<Triangle> triangles;  // counter-clockwise
  std::string problem;              // empty when usable
};

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double den = 2.0 * cross(ab, ac);
  const double ab2 = dot(ab, ab);
  const double ac2 = dot(ac, ac);
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / den, (ab.x * ac2 - ac.x * ab2) / den};
}

Vec2 circumcenter(const Triangle& t, std::span<const Vec2> gens) {
  return circumcenter(gens[t[0]], gens[t[1]], gens[t[2]]);
}

Triangulation restricted_delaunay(const Polygon& domain, const Lattice& lat, std::span<const Vec2> gens) {
  Triangulation tri;
  VoronoiDiagram vd;
  build_voronoi(lat, gens, vd);
  for (const auto& vertex : vd.vertices()) {
    std::vector<Index> sites;
    const auto* e = vertex.incident_edge();
    do {
      sites.push_back(static_cast<Index>(e->cell()->source_index()));
      e = e->rot_next();
    } while (e != vertex.incident_edge());
    if (sites.size() != 3) {
      Vec2 mean{};
      for (Index k : sites) mean = mean + gens[k];
      // degenerate vertices outside a non-convex domain never become dual cells
      if (!domain.contains((1.0 / static_cast<double>(sites.size())) * mean)) continue;
      tri.problem = "cocircular generators (Voronoi vertex of degree " + std::to_string(sites.size()) + ")";
      return tri;
    }
    const Vec2 a = gens[sites[0]], b = gens[sites[1]], c = gens[sites[2]];
    const std::int64_t orient = (lat.ix(b.x) - lat.ix(a.x)) * (lat.iy(c.y) - lat.iy(a.y)) -
                                (lat.iy(b.y) - lat.iy(a.y)) * (lat.ix(c.x) - lat.ix(a.x));
    if (orient == 0) continue;
    if (orient < 0) std::swap(sites[1], sites[2]);
    if (!domain.contains((1.0 / 3.0) * (a + b + c))) continue;
    tri.triangles.push_back({sites[0], sites[1], sites[2]});
  }
  if (tri.triangles.empty()) tri.problem = "no triangles (collinear or too few generators)";
  return tri;
}

/// Directed edge (a, b) of a CCW triangle -> the triangle's third corner.
std::map<std::pair<Index, Index>, Index> opposite_corners(const std::vector<Triangle>& tris) {
  std::map<std::pair<Index, Index>, Index> opp;
  for (const auto& t : tris)
    for (int k = 0; k < 3; ++k) opp[{t[k], t[(k + 1) % 3]}] = t[(k + 2) % 3];
  return opp;
}

/// The triangles must tile the polygon spanned by the boundary generators.
std::string conformity_problem(const std::vector<Triangle>& tris, std::span<const Vec2> gens,
                               const std::vector<bool>& on_boundary) {
  const auto opp = opposite_corners(tris);
  double area = 0.0;
  for (const auto& t : tris) area += 0.5 * cross(gens[t[1]] - gens[t[0]], gens[t[2]] - gens[t[0]]);
  // hull edges have no reverse twin; each must join boundary generators
  std::vector<Index> next(gens.size(), kNoIndex);
  std::size_t hull_edges = 0;
  for (const auto& [edge, w] : opp) {
    const auto [a, b] = edge;
    if (opp.count({b, a})) continue;
    if (!on_boundary[a] || !on_boundary[b]) return "a boundary edge joins a non-boundary generator";
    if (next[a] != kNoIndex) return "boundary generators do not form a single loop";
    next[a] = b;
    ++hull_edges;
  }
  const auto nb = static_cast<std::size_t>(std::count(on_boundary.begin(), on_boundary.end(), true));
  if (hull_edges != nb) return "triangulation boundary does not pass through every boundary generator";
  const Index start = static_cast<Index>(std::find(on_boundary.begin(), on_boundary.end(), true) - on_boundary.begin());
  double loop_area = 0.0;
  std::size_t steps = 0;
  Index a = start;
  do {
    const Index b = next[a];
    if (b == kNoIndex) return "boundary generators do not form a single loop";
    loop_area += 0.5 * cross(gens[a], gens[b]);
    a = b;
    ++steps;
  } while (a != start && steps <= nb);
  if (steps != nb) return "boundary generators do not form a single loop";
  if (std::abs(loop_area - area) > 1e-9 * std::abs(loop_area)) return "triangles do not tile the domain";
  return {};
}

double corner_angle(Vec2 apex, Vec2 a, Vec2 b) {
  const Vec2 u = a - apex;
  const Vec2 v = b - apex;
  return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

/// Lloyd can leave a few triangles with an obtuse corner, whose circumcentre
/// then falls outside and spoils the convexity of a diamond. Each such corner
/// is pushed radially away from the midpoint of the opposite edge, out of the
/// Thales circle; hull triangles get a wider margin so their dual vertex stays
/// clear of the boundary.
void regularize(const Polygon& domain, const Lattice& lat, std::vector<Vec2>& gens, const std::vector<bool>& fixed,
                double h) {
  constexpr double kInteriorLimit = 89.0 * M_PI / 180.0;
  constexpr double kHullLimit = 80.0 * M_PI / 180.0;
  const double max_move = 0.3 * h;
  for (int pass = 0; pass < 50; ++pass) {
    const Triangulation tri = restricted_delaunay(domain, lat, gens);
    if (!tri.problem.empty()) return;
    const auto opp = opposite_corners(tri.triangles);
    std::vector<bool> touched(gens.size(), false);
    bool moved = false;
    for (const auto& [edge, w] : opp) {
      const auto [a, b] = edge;
      const bool hull = !opp.count({b, a});
      if (corner_angle(gens[w], gens[a], gens[b]) < (hull ? kHullLimit : kInteriorLimit)) continue;
      if (touched[w] || touched[a] || touched[b]) continue;
      if (!fixed[w]) {
        const Vec2 m = 0.5 * (gens[a] + gens[b]);
        const Vec2 off = gens[w] - m;
        const double radius = (hull ? 1.25 : 1.1) * 0.5 * norm(gens[b] - gens[a]);
        const Vec2 target = m + (radius / norm(off)) * off;
        if (norm(target - gens[w]) > max_move || !domain.contains(target)) continue;
        gens[w] = lat.snap(target);
      } else {
        // pinned corner: close the angle by turning the free ends about it
        const int free_ends = int(!fixed[a]) + int(!fixed[b]);
        if (free_ends == 0) continue;
        const double turn = (corner_angle(gens[w], gens[a], gens[b]) - 85.0 * M_PI / 180.0) / free_ends;
        const double sense = cross(gens[a] - gens[w], gens[b] - gens[w]) > 0.0 ? 1.0 : -1.0;
        auto turned = [&](Index p, double angle) {
          const Vec2 r = gens[p] - gens[w];
          const double c = std::cos(angle), s = std::sin(angle);
          return gens[w] + Vec2{c * r.x - s * r.y, s * r.x + c * r.y};
        };
        const Vec2 na = fixed[a] ? gens[a] : turned(a, sense * turn);
        const Vec2 nb = fixed[b] ? gens[b] : turned(b, -sense * turn);
        if (norm(na - gens[a]) > max_move || norm(nb - gens[b]) > max_move || !domain.contains(na) ||
            !domain.contains(nb))
          continue;
        gens[a] = lat.snap(na);
        gens[b] = lat.snap(nb);
      }
      touched[w] = touched[a] = touched[b] = true;
      moved = true;
    }
    if (!moved) return;
  }

}

/// Side generators whose triangle fan contains a right or obtuse corner. On a
/// straight side this means a single interior neighbour, and no local move of
/// that neighbour can fix it.
std::vector<std::size_t> crowded_side_generators(const Polygon& domain, const Lattice& lat,
                                                 std::span<const Vec2> gens, const std::vector<int>& place) {
  const Triangulation tri = restricted_delaunay(domain, lat, gens);
  std::vector<std::size_t> out;
  if (!tri.problem.empty()) return out;
  std::vector<double> widest(gens.size(), 0.0);
  for (const auto& t : tri.triangles)
    for (int k = 0; k < 3; ++k) {
      const Index w = t[k];
      widest[w] = std::max(widest[w], corner_angle(gens[w], gens[t[(k + 1) % 3]], gens[t[(k + 2) % 3]]));
    }
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (place[i] >= 0 && widest[i] >= 89.0 * M_PI / 180.0) out.push_back(i);
  return out;
}

/// Dual cells from the triangles; triangles sharing a circumcentre (to within
/// `tol`) across an interior edge are merged into one polygon.
std::vector<DualPolygon> dual_cells(const std::vector<Triangle>& tris, std::span<const Vec2> gens, double tol) {
  const std::size_t nt = tris.size();
  std::vector<Vec2> cc(nt);
  for (std::size_t t = 0; t < nt; ++t) cc[t] = circumcenter(tris[t], gens);

  std::vector<std::size_t> parent(nt);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::pair<Index, Index>, std::size_t> owner;
  for (std::size_t t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) owner[{tris[t][k], tris[t][(k + 1) % 3]}] = t;
  for (const auto& [edge, t] : owner) {
    const auto twin = owner.find({edge.second, edge.first});
    if (twin == owner.end() || norm(cc[t] - cc[twin->second]) > tol) continue;
    const std::size_t ra = find(t), rb = find(twin->second);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::vector<DualPolygon> cells;
  std::map<std::size_t, std::size_t> slot;
  std::vector<std::size_t> members;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t r = find(t);
    auto [it, fresh] = slot.emplace(r, cells.size());
    if (fresh) {
      cells.push_back({{tris[t].begin(), tris[t].end()}, cc[t]});
      members.push_back(1);
      continue;
    }
    DualPolygon& cell = cells[it->second];
    for (Index c : tris[t])
      if (std::find(cell.corners.begin(), cell.corners.end(), c) == cell.corners.end()) cell.corners.push_back(c);
    cell.center = cell.center + cc[t];
    ++members[it->second];
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    DualPolygon& cell = cells[k];
    if (members[k] == 1) continue;
    cell.center = (1.0 / static_cast<double>(members[k])) * cell.center;
    const Vec2 o = cell.center;
    std::sort(cell.corners.begin(), cell.corners.end(), [&](Index p, Index q) {
      return std::atan2(gens[p].y - o.y, gens[p].x - o.x) < std::atan2(gens[q].y - o.y, gens[q].x - o.x);
    });
  }
  return cells;
}

}  // namespace

PrimalDualMesh mesh_from_generators(const Polygon& domain, std::vector<Vec2> generators,
                                    const std::vector<bool>& on_boundary, int max_retries, std::uint64_t seed) {
  if (generators.size() != on_boundary.size()) throw MeshError("generators and boundary flags differ in length");
  const Lattice lat(domain);
  for (auto& g : generators) g = lat.snap(g);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const double h = std::sqrt(std::abs(domain.area()) / std::max<std::size_t>(1, generators.size()));
  std::string problem;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    if (attempt > 0) {
      for (std::size_t i = 0; i < generators.size(); ++i) {
        if (on_boundary[i]) continue;
        const Vec2 jitter{uniform(rng) - 0.5, uniform(rng) - 0.5};
        generators[i] = lat.snap(generators[i] + (1e-6 * h) * jitter);
      }
    }
    const Triangulation tri = restricted_delaunay(domain, lat, generators);
    problem = tri.problem;
    if (!problem.empty()) continue;
    problem = conformity_problem(tri.triangles, generators, on_boundary);
    if (!problem.empty()) continue;
    return build_from_dual(generators, on_boundary, dual_cells(tri.triangles, generators, 1e-4 * h));
  }
  throw MeshError("cannot build a valid Delaunay dual after " + std::to_string(max_retries + 1) +
                  " attempts: " + problem);
}

namespace {

/// One construction attempt from the given seed; returns the generator set and
/// which generators lie on the boundary.
std::pair<std::vector<Vec2>, std::vector<bool>> cvt_generators(const Polygon& domain, const Lattice& lat,
                                                              const CvtOptions& options, std::uint64_t seed) {
  const double n = options.n_generators;
  const double A = domain.area();
  const double h = std::sqrt(A / n);
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
  for (Vec2 p : domain.vertices) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  std::mt19937_64 rng(seed);
  std::vector<Vec2> gens;
  std::size_t guard = 0;
  while (gens.size() < static_cast<std::size_t>(options.n_generators)) {
    if (++guard > 1000u * static_cast<std::size_t>(options.n_generators))
      throw MeshError("cannot place generators in the domain");
    const Vec2 p = lat.snap({xmin + (xmax - xmin) * uniform(rng), ymin + (ymax - ymin) * uniform(rng)});
    if (!domain.contains(p) || std::find(gens.begin(), gens.end(), p) != gens.end()) continue;
    gens.push_back(p);
  }

  // Boundary spacing hb of a hexagonal packing whose half cells fill the
  // perimeter strip: (sqrt3/2) n hb^2 - (sqrt3/4) P hb = A.
  const double P = domain.perimeter();
  const double r3 = std::sqrt(3.0);
  const double hb = (0.25 * r3 * P + std::sqrt(3.0 / 16.0 * P * P + 2.0 * r3 * n * A)) / (r3 * n);
  std::vector<int> place(gens.size(), kInterior);
  const std::size_t m = domain.vertices.size();
  std::size_t next = 0;
  for (std::size_t k = 0; k < m && next < gens.size(); ++k) {
    const double len = norm(domain.vertices[(k + 1) % m] - domain.vertices[k]);
    const int segs = std::max(1, static_cast<int>(std::lround(len / hb)));
    gens[next] = lat.snap(domain.vertices[k]);
    place[next++] = kCorner;
    for (int j = 1; j < segs && next < gens.size(); ++j) place[next++] = static_cast<int>(k);
  }
  if (next + 3 > gens.size()) throw MeshError("too few generators for the boundary of this domain");

  auto relax = [&](int iterations) {
    respace_sides(domain, lat, gens, place);
    std::vector<bool> pinned(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) pinned[i] = place[i] != kInterior;
    for (int it = 0; it < iterations; ++it) lloyd_step(domain, lat, gens, pinned);
  };
  relax(options.lloyd_iterations);

  // A side generator with a single interior neighbour marks a side holding one
  // generator too many; release it into the interior and relax again.
  const int extra = std::max(20, options.lloyd_iterations / 8);
  for (int round = 0; round < 40; ++round) {
    const auto crowded = crowded_side_generators(domain, lat, gens, place);
    if (crowded.empty()) break;
    std::vector<bool> released(m, false);
    bool any = false;
    for (std::size_t i : crowded) {
      const int k = place[i];
      if (released[k]) continue;
      released[k] = true;
      const Vec2 a = domain.vertices[k];
      const Vec2 b = domain.vertices[(k + 1) % m];
      // never thin a side beyond the interior spacing
      const auto on_side = static_cast<double>(std::count(place.begin(), place.end(), k));
      if (norm(b - a) / on_side > 1.6 * h) continue;
      const Vec2 target = gens[i] + (0.5 * h / norm(b - a)) * rotate_left(b - a);
      if (!domain.contains(target)) continue;
      gens[i] = lat.snap(target);
      place[i] = kInterior;
      any = true;
    }
    if (!any) break;
    relax(extra);
  }

  std::vector<bool> on_boundary(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) on_boundary[i] = place[i] != kInterior;
  regularize(domain, lat, gens, on_boundary, h);
  return {std::move(gens), std::move(on_boundary)};
}

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
  if (attempt == 0) return seed;
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(attempt);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

PrimalDualMesh build_cvt_mesh(const Polygon& domain, const CvtOptions& options) {
  if (domain.vertices.size() < 3 || !(domain.area() > 0.0)) throw MeshError("CVT domain must be a CCW polygon");
  if (options.n_generators < 10) throw MeshError("CVT needs at least ten generators");
  if (options.lloyd_iterations < 0) throw MeshError("negative Lloyd iteration count");

  const Lattice lat(domain);
  std::string last;
  // a rejected mesh restarts from a seed derived from the user's seed, so the
  // outcome stays a function of the options alone
  for (int attempt = 0; attempt <= std::max(0, options.max_retries); ++attempt) {
    const std::uint64_t seed = attempt_seed(options.seed, attempt);
    try {
      auto [gens, on_boundary] = cvt_generators(domain, lat, options, seed);
      PrimalDualMesh mesh = mesh_from_generators(domain, std::move(gens), on_boundary, options.max_retries, seed);
      const ValidationReport report = validate_mesh(mesh, MeshKind::Cvt);
      if (report.accepted()) return mesh;
      last = "mesh failed validation:\n" + format_report(report);
    } catch (const MeshError& e) {
      last = e.what();
    }
  }
  throw MeshError("no valid CVT mesh after " + std::to_string(std::max(0, options.max_retries) + 1) +
                  " attempts; last: " + last);
}

}  // namespace qgfv
