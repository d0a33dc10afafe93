#include "qgfv/operators.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qgfv {

namespace {

void check(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": size " + std::to_string(got) + ", expected " +
                                std::to_string(want));
}

using Ptrdiff = std::ptrdiff_t;

constexpr std::size_t kBlock = 1024;

}  // namespace

namespace kernels {

void remap_cell_to_vertex(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> out) {
  check(f.size(), mesh.num_cells(), "remap_cell_to_vertex input");
  check(out.size(), mesh.num_vertices(), "remap_cell_to_vertex output");
  const auto nv = static_cast<Ptrdiff>(mesh.num_vertices());
#pragma omp parallel for schedule(static)
  for (Ptrdiff v = 0; v < nv; ++v) {
    const auto cells = mesh.cells_on_vertex(v);
    const auto kites = mesh.kite_areas_on_vertex(v);
    double s = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k) s += f[cells[k]] * kites[k];
    out[v] = s / mesh.vertex_area(v);
  }
}

void remap_cell_to_edge(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> out) {
  check(f.size(), mesh.num_cells(), "remap_cell_to_edge input");
  check(out.size(), mesh.num_edges(), "remap_cell_to_edge output");
  const auto ne = static_cast<Ptrdiff>(mesh.num_edges());
#pragma omp parallel for schedule(static)
  for (Ptrdiff e = 0; e < ne; ++e) {
    const auto [c0, c1] = mesh.cells(e);
    out[e] = 0.5 * (f[c0] + f[c1]);
  }
}

void gradient(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> out) {
  check(f.size(), mesh.num_cells(), "gradient input");
  check(out.size(), mesh.num_edges(), "gradient output");
  const auto ne = static_cast<Ptrdiff>(mesh.num_edges());
#pragma omp parallel for schedule(static)
  for (Ptrdiff e = 0; e < ne; ++e) {
    const auto [c0, c1] = mesh.cells(e);
    out[e] = -(f[c0] * mesh.cell_sign(e, 0) + f[c1] * mesh.cell_sign(e, 1)) / mesh.d(e);
  }
}

void skew_gradient(const PrimalDualMesh& mesh, std::span<const double> g, std::span<double> out) {
  check(g.size(), mesh.num_vertices(), "skew_gradient input");
  check(out.size(), mesh.num_edges(), "skew_gradient output");
  const auto ne = static_cast<Ptrdiff>(mesh.num_edges());
#pragma omp parallel for schedule(static)
  for (Ptrdiff e = 0; e < ne; ++e) {
    const auto [v0, v1] = mesh.vertices(e);
    double s = g[v0] * mesh.vertex_sign(e, 0);
    if (v1 != kNoIndex) s += g[v1] * mesh.vertex_sign(e, 1);
    out[e] = s / mesh.l(e);
  }
}

void divergence(const PrimalDualMesh& mesh, std::span<const double> u, std::span<double> out) {
  check(u.size(), mesh.num_edges(), "divergence input");
  check(out.size(), mesh.num_cells(), "divergence output");
  const auto nc = static_cast<Ptrdiff>(mesh.num_cells());
#pragma omp parallel for schedule(static)
  for (Ptrdiff i = 0; i < nc; ++i) {
    const auto edges = mesh.edges_on_cell(i);
    const auto signs = mesh.edge_signs_on_cell(i);
    double s = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) s += u[edges[k]] * mesh.l(edges[k]) * signs[k];
    out[i] = s / mesh.cell_area(i);
  }
}

void flux_divergence(const PrimalDualMesh& mesh, std::span<const double> u, std::span<const double> q_hat,
                     std::span<double> out) {
  check(u.size(), mesh.num_edges(), "flux_divergence velocity");
  check(q_hat.size(), mesh.num_edges(), "flux_divergence edge values");
  check(out.size(), mesh.num_cells(), "flux_divergence output");
  const auto nc = static_cast<Ptrdiff>(mesh.num_cells());
#pragma omp parallel for schedule(static)
  for (Ptrdiff i = 0; i < nc; ++i) {
    const auto edges = mesh.edges_on_cell(i);
    const auto signs = mesh.edge_signs_on_cell(i);
    double s = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Index e = edges[k];
      s += u[e] * q_hat[e] * mesh.l(e) * signs[k];
    }
    out[i] = s / mesh.cell_area(i);
  }
}

void curl(const PrimalDualMesh& mesh, std::span<const double> u, std::span<double> out) {
  check(u.size(), mesh.num_edges(), "curl input");
  check(out.size(), mesh.num_vertices(), "curl output");
  const auto nv = static_cast<Ptrdiff>(mesh.num_vertices());
#pragma omp parallel for schedule(static)
  for (Ptrdiff v = 0; v < nv; ++v) {
    const auto edges = mesh.edges_on_vertex(v);
    const auto signs = mesh.edge_signs_on_vertex(v);
    double s = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) s += u[edges[k]] * mesh.d(edges[k]) * signs[k];
    out[v] = -s / mesh.vertex_area(v);
  }
}

void laplacian(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> scratch,
               std::span<double> out) {
  gradient(mesh, f, scratch);
  divergence(mesh, scratch, out);
}

}  // namespace kernels

VertexField remap_cell_to_vertex(const PrimalDualMesh& mesh, const CellField& f) {
  VertexField out(mesh.num_vertices());
  kernels::remap_cell_to_vertex(mesh, f.span(), out.span());
  return out;
}

EdgeField remap_cell_to_edge(const PrimalDualMesh& mesh, const CellField& f) {
  EdgeField out(mesh.num_edges());
  kernels::remap_cell_to_edge(mesh, f.span(), out.span());
  return out;
}

EdgeField gradient(const PrimalDualMesh& mesh, const CellField& f) {
  EdgeField out(mesh.num_edges());
  kernels::gradient(mesh, f.span(), out.span());
  return out;
}

EdgeField skew_gradient(const PrimalDualMesh& mesh, const VertexField& g) {
  EdgeField out(mesh.num_edges());
  kernels::skew_gradient(mesh, g.span(), out.span());
  return out;
}

CellField divergence(const PrimalDualMesh& mesh, const EdgeField& u) {
  CellField out(mesh.num_cells());
  kernels::divergence(mesh, u.span(), out.span());
  return out;
}

CellField flux_divergence(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& q_hat) {
  CellField out(mesh.num_cells());
  kernels::flux_divergence(mesh, u.span(), q_hat.span(), out.span());
  return out;
}

VertexField curl(const PrimalDualMesh& mesh, const EdgeField& u) {
  VertexField out(mesh.num_vertices());
  kernels::curl(mesh, u.span(), out.span());
  return out;
}

CellField laplacian(const PrimalDualMesh& mesh, const CellField& f) {
  std::vector<double> scratch(mesh.num_edges());
  CellField out(mesh.num_cells());
  kernels::laplacian(mesh, f.span(), scratch, out.span());
  return out;
}

double ordered_sum(std::size_t n, double (*term)(std::size_t, const void*), const void* ctx) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (Ptrdiff b = 0; b < static_cast<Ptrdiff>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i, ctx);
    partial[b] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double inner_product_cell(const PrimalDualMesh& mesh, const CellField& f, const CellField& g) {
  check(f.size(), mesh.num_cells(), "inner_product_cell");
  check(g.size(), mesh.num_cells(), "inner_product_cell");
  return ordered_sum(mesh.num_cells(),
                     [&](std::size_t i) { return f[i] * g[i] * mesh.cell_area(static_cast<Index>(i)); });
}

double inner_product_vertex(const PrimalDualMesh& mesh, const VertexField& f, const VertexField& g) {
  check(f.size(), mesh.num_vertices(), "inner_product_vertex");
  check(g.size(), mesh.num_vertices(), "inner_product_vertex");
  return ordered_sum(mesh.num_vertices(),
                     [&](std::size_t v) { return f[v] * g[v] * mesh.vertex_area(static_cast<Index>(v)); });
}

double inner_product_edge(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& v) {
  check(u.size(), mesh.num_edges(), "inner_product_edge");
  check(v.size(), mesh.num_edges(), "inner_product_edge");
  return ordered_sum(mesh.num_edges(),
                     [&](std::size_t e) { return u[e] * v[e] * mesh.diamond_area(static_cast<Index>(e)); });
}

SparseMatrix laplacian_matrix(const PrimalDualMesh& mesh) {
  const std::size_t nc = mesh.num_cells();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * mesh.num_edges());
  for (std::size_t i = 0; i < nc; ++i) {
    const Index c = static_cast<Index>(i);
    const auto edges = mesh.edges_on_cell(c);
    const auto signs = mesh.edge_signs_on_cell(c);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Index e = edges[k];
      // l_e n_{e,i} (-1/d_e) sum_j f_j n_{e,j}
      const double w = -mesh.l(e) * signs[k] / (mesh.d(e) * mesh.cell_area(c));
      for (int s = 0; s < 2; ++s) trips.emplace_back(c, mesh.cells(e)[s], w * mesh.cell_sign(e, s));
    }
  }
  SparseMatrix L(static_cast<Index>(nc), static_cast<Index>(nc));
  L.setFromTriplets(trips.begin(), trips.end());
  return L;
}

}  // namespace qgfv
