#include "qgfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace qgfv {

DiagnosticRecord compute_diagnostics(const PrimalDualMesh& mesh, const SchemeState& state) {
  if (!state.diagnostics) throw std::logic_error("diagnostics requested for a state without a diagnostics cache");
  const auto& d = *state.diagnostics;
  const CellField ones(mesh.num_cells(), 1.0);
  DiagnosticRecord r;
  r.time = state.time;
  r.total_pv = inner_product_cell(mesh, d.q, ones);
  r.potential_enstrophy = inner_product_cell(mesh, d.q, d.q);
  r.mass = inner_product_cell(mesh, d.psi, ones);
  const auto [lo, hi] = std::minmax_element(d.q.values.begin(), d.q.values.end());
  if (lo != d.q.values.end()) {
    r.pv_min = *lo;
    r.pv_max = *hi;
  }
  const CellField div = divergence(mesh, d.u);
  for (double v : div.values) r.max_cell_divergence = std::max(r.max_cell_divergence, std::abs(v));
  r.kinetic_energy_proxy = inner_product_edge(mesh, d.u, d.u);
  return r;
}

void PvEnvelope::update(const DiagnosticRecord& r) {
  min = std::min(min, r.pv_min);
  max = std::max(max, r.pv_max);
}

std::string format_csv_row(const DiagnosticRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.time, r.total_pv, r.pv_min,
                r.pv_max, r.potential_enstrophy, r.mass, r.max_cell_divergence, r.kinetic_energy_proxy);
  return buf;
}

void write_csv_header(std::ostream& os) { os << kDiagnosticsCsvHeader << '\n'; }

void write_csv_row(std::ostream& os, const DiagnosticRecord& r) { os << format_csv_row(r) << '\n'; }

}  // namespace qgfv
