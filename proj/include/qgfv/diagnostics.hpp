#pragma once

#include <iosfwd>
#include <limits>
#include <string>

#include "qgfv/schemes.hpp"

namespace qgfv {

struct DiagnosticRecord {
  double time = 0.0;
  double total_pv = 0.0;  // (q, 1)_cell
  double pv_min = 0.0;
  double pv_max = 0.0;
  double potential_enstrophy = 0.0;  // (q, q)_cell
  double mass = 0.0;                 // (psi, 1)_cell
  double max_cell_divergence = 0.0;
  double kinetic_energy_proxy = 0.0;  // (u, u)_edge
};

/// Reads the state's diagnostics cache; throws std::logic_error when it is empty.
DiagnosticRecord compute_diagnostics(const PrimalDualMesh& mesh, const SchemeState& state);

/// Extremes of the PV over every record seen so far.
struct PvEnvelope {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  void update(const DiagnosticRecord& r);
};

inline constexpr const char* kDiagnosticsCsvHeader = "time,total_pv,pv_min,pv_max,enstrophy,mass,max_div,ke";

/// One CSV row with 17 significant digits per value, no trailing newline.
std::string format_csv_row(const DiagnosticRecord& r);
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticRecord& r);

}  // namespace qgfv
