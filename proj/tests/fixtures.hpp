#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "qgfv/cvt.hpp"
#include "qgfv/mesh.hpp"

namespace fixtures {

inline const qgfv::PrimalDualMesh& q2() {
  static const auto m = qgfv::build_quad_mesh(2, 2, 1.0, 1.0);
  return m;
}

inline const qgfv::PrimalDualMesh& quad8() {
  static const auto m = qgfv::build_quad_mesh(8, 8, 1.0, 1.0);
  return m;
}

inline const qgfv::PrimalDualMesh& cvt64() {
  static const auto m = qgfv::build_cvt_mesh(qgfv::Polygon::rectangle(1.0, 1.0), {64, 200, 7});
  return m;
}

template <class F>
F random_field(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  F f(n);
  for (auto& v : f.values) v = U(rng);
  return f;
}

template <class F>
double max_abs(const F& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

inline qgfv::Index cell_at(const qgfv::PrimalDualMesh& m, qgfv::Vec2 p) {
  for (std::size_t i = 0; i < m.num_cells(); ++i)
    if (qgfv::norm(m.cell_center(static_cast<qgfv::Index>(i)) - p) < 1e-12) return static_cast<qgfv::Index>(i);
  return qgfv::kNoIndex;
}

inline qgfv::Index vertex_at(const qgfv::PrimalDualMesh& m, qgfv::Vec2 p) {
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (qgfv::norm(m.vertex_position(static_cast<qgfv::Index>(v)) - p) < 1e-12) return static_cast<qgfv::Index>(v);
  return qgfv::kNoIndex;
}

inline qgfv::Index edge_between(const qgfv::PrimalDualMesh& m, qgfv::Index a, qgfv::Index b) {
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto [c0, c1] = m.cells(static_cast<qgfv::Index>(e));
    if ((c0 == a && c1 == b) || (c0 == b && c1 == a)) return static_cast<qgfv::Index>(e);
  }
  return qgfv::kNoIndex;
}

}  // namespace fixtures
