#include "qgfv/reference.hpp"

namespace qgfv::reference {

VertexField remap_cell_to_vertex(const PrimalDualMesh& mesh, const CellField& f) {
  VertexField out(mesh.num_vertices());
  for (const Kite& k : mesh.tables().kites) out[k.vertex] += f[k.cell] * k.area;
  for (std::size_t v = 0; v < out.size(); ++v) out[v] /= mesh.vertex_area(static_cast<Index>(v));
  return out;
}

EdgeField remap_cell_to_edge(const PrimalDualMesh& mesh, const CellField& f) {
  EdgeField out(mesh.num_edges());
  for (std::size_t e = 0; e < out.size(); ++e) {
    const auto& ce = mesh.tables().cells_on_edge[e];
    out[e] = 0.5 * (f[ce[0]] + f[ce[1]]);
  }
  return out;
}

EdgeField gradient(const PrimalDualMesh& mesh, const CellField& f) {
  const auto& t = mesh.tables();
  EdgeField out(mesh.num_edges());
  for (std::size_t e = 0; e < out.size(); ++e) {
    double s = 0.0;
    for (int k = 0; k < 2; ++k) s += f[t.cells_on_edge[e][k]] * t.cell_signs[e][k];
    out[e] = -s / t.d_e[e];
  }
  return out;
}

EdgeField skew_gradient(const PrimalDualMesh& mesh, const VertexField& g) {
  const auto& t = mesh.tables();
  EdgeField out(mesh.num_edges());
  for (std::size_t e = 0; e < out.size(); ++e) {
    double s = 0.0;
    for (int k = 0; k < 2; ++k)
      if (t.vertices_on_edge[e][k] != kNoIndex) s += g[t.vertices_on_edge[e][k]] * t.vertex_signs[e][k];
    out[e] = s / t.l_e[e];
  }
  return out;
}

CellField divergence(const PrimalDualMesh& mesh, const EdgeField& u) {
  const auto& t = mesh.tables();
  CellField out(mesh.num_cells());
  for (std::size_t e = 0; e < u.size(); ++e)
    for (int k = 0; k < 2; ++k) out[t.cells_on_edge[e][k]] += u[e] * t.l_e[e] * t.cell_signs[e][k];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= t.cell_areas[i];
  return out;
}

CellField flux_divergence(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& q_hat) {
  EdgeField flux(u.size());
  for (std::size_t e = 0; e < u.size(); ++e) flux[e] = u[e] * q_hat[e];
  return divergence(mesh, flux);
}

VertexField curl(const PrimalDualMesh& mesh, const EdgeField& u) {
  const auto& t = mesh.tables();
  VertexField out(mesh.num_vertices());
  for (std::size_t e = 0; e < u.size(); ++e)
    for (int k = 0; k < 2; ++k) {
      const Index v = t.vertices_on_edge[e][k];
      if (v != kNoIndex) out[v] -= u[e] * t.d_e[e] * t.vertex_signs[e][k];
    }
  for (std::size_t v = 0; v < out.size(); ++v) out[v] /= t.vertex_areas[v];
  return out;
}

CellField laplacian(const PrimalDualMesh& mesh, const CellField& f) { return divergence(mesh, gradient(mesh, f)); }

double inner_product_cell(const PrimalDualMesh& mesh, const CellField& f, const CellField& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] * mesh.cell_area(static_cast<Index>(i));
  return s;
}

double inner_product_edge(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& v) {
  double s = 0.0;
  for (std::size_t e = 0; e < u.size(); ++e) s += u[e] * v[e] * mesh.diamond_area(static_cast<Index>(e));
  return s;
}

}  // namespace qgfv::reference
