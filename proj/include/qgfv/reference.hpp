#pragma once

#include "qgfv/mesh.hpp"

// Serial scatter formulations of the operators: loops run over edges or kites
// and accumulate into their cells and vertices. Slower and not thread-safe, but
// written independently of the gather kernels, which they cross-check.
namespace qgfv::reference {

VertexField remap_cell_to_vertex(const PrimalDualMesh& mesh, const CellField& f);
EdgeField remap_cell_to_edge(const PrimalDualMesh& mesh, const CellField& f);
EdgeField gradient(const PrimalDualMesh& mesh, const CellField& f);
EdgeField skew_gradient(const PrimalDualMesh& mesh, const VertexField& g);
CellField divergence(const PrimalDualMesh& mesh, const EdgeField& u);
CellField flux_divergence(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& q_hat);
VertexField curl(const PrimalDualMesh& mesh, const EdgeField& u);
CellField laplacian(const PrimalDualMesh& mesh, const CellField& f);

double inner_product_cell(const PrimalDualMesh& mesh, const CellField& f, const CellField& g);
double inner_product_edge(const PrimalDualMesh& mesh, const EdgeField& u, const EdgeField& v);

}  // namespace qgfv::reference
