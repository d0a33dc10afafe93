#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "qgfv/elliptic.hpp"

namespace qgfv {

enum class SchemeKind { IVFV1, IVFV2, VSFV1, VSFV2 };

std::string_view scheme_name(SchemeKind kind);
/// Case-insensitive; throws ConfigError on an unknown name.
SchemeKind parse_scheme(std::string_view name);

/// Wind forcing as the per-cell values [curl tau]_i / H (s^-2).
struct Forcing {
  CellField wind_curl;
};

struct SchemeDiagnostics {
  CellField source;  // the prognostic field these were computed from
  CellField psi;
  double l = 0.0;
  VertexField psi_tilde;
  EdgeField u;
  CellField zeta;
  CellField q;      // PV on all cells as used for the edge values
  EdgeField q_hat;
};

struct SchemeState {
  double time = 0.0;
  CellField prognostic;  // q, or psi for VSFV1
  std::optional<SchemeDiagnostics> diagnostics;
};

struct SchemeOptions {
  /// VSFV2 only: overwrite q on BC from the no-slip vorticity before the edge
  /// values are formed.
  bool boundary_pv_update = true;
  /// When set, the transported PV on the edges is taken from this field instead
  /// of the evolving one (the linearized problem transports beta y).
  std::optional<CellField> frozen_transport_pv;
};

/// One scheme on one mesh, with the elliptic factorizations cached.
class QgModel {
 public:
  QgModel(const PrimalDualMesh& mesh, PhysicalParams params, Forcing forcing, SchemeKind kind,
          SchemeOptions options = {});
  ~QgModel();
  QgModel(QgModel&&) noexcept;

  const PrimalDualMesh& mesh() const { return *mesh_; }
  const PhysicalParams& params() const { return params_; }
  const Forcing& forcing() const { return forcing_; }
  SchemeKind kind() const { return kind_; }
  const StreamfunctionSolver& streamfunction_solver() const { return *stream_; }

  SchemeDiagnostics diagnose(const CellField& prognostic) const;
  /// dq/dt for the RK4 schemes; zero on BC for IVFV2 and VSFV2. Throws
  /// std::logic_error on VSFV1 or when the diagnostics are missing or stale.
  CellField tendency(const SchemeState& state) const;
  CellField tendency(const SchemeDiagnostics& diag) const;

  /// Viscous-model tendency with psi given: zeta = (g/f0) Lap(psi) on all cells,
  /// q on BC from that vorticity, rows on IC only. Linear in psi when the
  /// transported PV is frozen.
  CellField stream_tendency(const CellField& psi) const;

  SchemeState initial_state(CellField prognostic, double time = 0.0) const;
  /// Advances by dt (RK4, or semi-implicit Euler for VSFV1) and refreshes the diagnostics.
  void step(SchemeState& state, double dt);

  /// Right-hand side of the VSFV1 bordered system at the given state.
  Eigen::VectorXd semi_implicit_rhs(const SchemeDiagnostics& diag, double dt) const;

 private:
  EdgeField edge_pv(const CellField& q, bool interior_only) const;
  CellField tendency_rows(const SchemeDiagnostics& d, bool interior_only, bool viscous) const;

  const PrimalDualMesh* mesh_;
  PhysicalParams params_;
  Forcing forcing_;
  SchemeKind kind_;
  SchemeOptions options_;
  std::unique_ptr<StreamfunctionSolver> stream_;
  std::unique_ptr<DirectSolver> semi_implicit_;
  double semi_implicit_dt_ = 0.0;
};

using Tendency = std::function<CellField(const CellField& q, double t)>;

/// Classical RK4. Throws SolverError naming the stage when a stage value is not
/// finite. The returned state carries no diagnostics.
SchemeState rk4_step(const Tendency& tendency, const SchemeState& state, double dt);

// Single-call forms of the scheme operations; each builds its own solver.
SchemeDiagnostics diagnose_ivfv1(const PrimalDualMesh& mesh, const PhysicalParams& params, const CellField& q);
CellField tendency_ivfv1(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                         const SchemeState& state);
CellField tendency_ivfv2(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                         const SchemeState& state);
CellField tendency_vsfv2(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                         const SchemeState& state);
/// q_i = beta y_i - (f0/H)(psi_i - b_i) on BC; other entries of `q` untouched.
void reset_boundary_pv(const PrimalDualMesh& mesh, const PhysicalParams& params, const CellField& psi, CellField& q);
SchemeState step_vsfv1(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                       const SchemeState& state, double dt);

}  // namespace qgfv
