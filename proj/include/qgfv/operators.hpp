#pragma once

#include <span>

#include <Eigen/SparseCore>

#include "qgfv/mesh.hpp"

namespace qgfv {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Span kernels write into caller-owned buffers and parallelise over the output
// index with OpenMP. Every output entry is a gather over a fixed adjacency
// row, so results do not depend on the thread count.
namespace kernels {

void remap_cell_to_vertex(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> out);
void remap_cell_to_edge(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> out);
void gradient(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> out);
void skew_gradient(const PrimalDualMesh& mesh, std::span<const double> g, std::span<double> out);
void divergence(const PrimalDualMesh& mesh, std::span<const double> u, std::span<double> out);
/// div(u q_hat) without forming the edge product.
void flux_divergence(const PrimalDualMesh& mesh, std::span<const double> u, std::span<const double> q_hat,
                     std::span<double> out);
void curl(const PrimalDualMesh& mesh, std::span<const double> u, std::span<double> out);
/// div(grad f); `scratch` holds one value per edge.
void laplacian(const PrimalDualMesh& mesh, std::span<const double> f, std::span<double> scratch,
               std::span<double> out);

}  // namespace kernels

/// Area-weighted average of the cells around each vertex.
VertexField remap_cell_to_vertex(const PrimalDualMesh& mesh, const CellField& f);
/// Arithmetic mean of the two cells of each edge.
EdgeField remap_cell_to_edge(const PrimalDualMesh& mesh, const CellField& f);
EdgeField gradient(const PrimalDualMesh& mesh, const CellField& f);
/// Boundary edges use their single vertex, i.e. g is taken as zero beyond the boundary.
EdgeField skew_gradient(const PrimalDualMesh& mesh, const VertexField& g);
/// No flux leaves through the boundary segments of boundary cells.
CellField divergence(const PrimalDualMesh& mesh, const EdgeField& u);
CellField flux_divergence(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& q_hat);
VertexField curl(const PrimalDualMesh& mesh, const EdgeField& u);
CellField laplacian(const PrimalDualMesh& mesh, const CellField& f);

double inner_product_cell(const PrimalDualMesh& mesh, const CellField& f, const CellField& g);
double inner_product_vertex(const PrimalDualMesh& mesh, const VertexField& f, const VertexField& g);
double inner_product_edge(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& v);

/// Sum of term(0..n-1) in fixed blocks: bitwise identical for any thread count.
double ordered_sum(std::size_t n, double (*term)(std::size_t, const void*), const void* ctx);

template <class F>
double ordered_sum(std::size_t n, const F& term) {
  return ordered_sum(
      n, [](std::size_t i, const void* c) { return (*static_cast<const F*>(c))(i); }, &term);
}

/// Sparse matrix of the cell Laplacian, row i = [Delta_h .]_i on all cells.
SparseMatrix laplacian_matrix(const PrimalDualMesh& mesh);

}  // namespace qgfv
