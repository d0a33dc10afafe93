#include "qgfv/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qgfv {

std::string_view scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::IVFV1: return "IVFV1";
    case SchemeKind::IVFV2: return "IVFV2";
    case SchemeKind::VSFV1: return "VSFV1";
    case SchemeKind::VSFV2: return "VSFV2";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto k : {SchemeKind::IVFV1, SchemeKind::IVFV2, SchemeKind::VSFV1, SchemeKind::VSFV2})
    if (up == scheme_name(k)) return k;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

QgModel::QgModel(const PrimalDualMesh& mesh, PhysicalParams params, Forcing forcing, SchemeKind kind,
                 SchemeOptions options)
    : mesh_(&mesh),
      params_(std::move(params)),
      forcing_(std::move(forcing)),
      kind_(kind),
      options_(std::move(options)) {
  params_.validate(mesh.num_cells());
  if (forcing_.wind_curl.size() == 0) forcing_.wind_curl = CellField(mesh.num_cells());
  if (forcing_.wind_curl.size() != mesh.num_cells()) throw ConfigError("forcing length does not match the mesh");
  if (options_.frozen_transport_pv && options_.frozen_transport_pv->size() != mesh.num_cells())
    throw ConfigError("frozen transport PV length does not match the mesh");
  stream_ = std::make_unique<StreamfunctionSolver>(mesh, params_);
}

QgModel::~QgModel() = default;
QgModel::QgModel(QgModel&&) noexcept = default;

EdgeField QgModel::edge_pv(const CellField& q, bool interior_only) const {
  if (options_.frozen_transport_pv) return remap_cell_to_edge(*mesh_, *options_.frozen_transport_pv);
  if (!interior_only) return remap_cell_to_edge(*mesh_, q);
  // PV is only defined on IC: edges touching BC take the interior value, and
  // edges between two BC cells (never used by IC\BC1 rows) get zero
  EdgeField out(mesh_->num_edges());
  for (std::size_t e = 0; e < out.size(); ++e) {
    const auto [c0, c1] = mesh_->cells(static_cast<Index>(e));
    const bool in0 = !mesh_->is_boundary_cell(c0), in1 = !mesh_->is_boundary_cell(c1);
    if (in0 && in1) out[e] = 0.5 * (q[c0] + q[c1]);
    else if (in0) out[e] = q[c0];
    else if (in1) out[e] = q[c1];
  }
  return out;
}

SchemeDiagnostics QgModel::diagnose(const CellField& prognostic) const {
  const auto& m = *mesh_;
  const std::size_t nc = m.num_cells();
  if (prognostic.size() != nc) throw std::invalid_argument("prognostic field length does not match the mesh");
  SchemeDiagnostics d;
  d.source = prognostic;
  const double f0H = params_.f0_over_H();
  auto planetary = [&](std::size_t i) {
    return params_.beta * m.cell_center(static_cast<Index>(i)).y - f0H * (d.psi[i] - params_.bottom(i));
  };

  if (kind_ == SchemeKind::VSFV1) {
    d.psi = prognostic;
    // psi carries the common value l on every BC cell
    for (std::size_t i = 0; i < nc; ++i)
      if (m.is_boundary_cell(static_cast<Index>(i))) {
        d.l = d.psi[i];
        break;
      }
    const CellField lap = laplacian(m, d.psi);
    d.zeta = CellField(nc);
    d.q = CellField(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      d.zeta[i] = params_.vorticity_scale() * lap[i];
      d.q[i] = d.zeta[i] + planetary(i);
    }
    d.q_hat = edge_pv(d.q, true);
  } else {
    const auto s = stream_->solve(prognostic);
    d.psi = s.psi;
    d.l = s.l;
    d.q = prognostic;
    d.zeta = CellField(nc);
    if (kind_ == SchemeKind::VSFV2) {
      const CellField lap = laplacian(m, d.psi);
      for (std::size_t i = 0; i < nc; ++i) d.zeta[i] = params_.vorticity_scale() * lap[i];
      if (options_.boundary_pv_update)
        for (std::size_t i = 0; i < nc; ++i)
          if (m.is_boundary_cell(static_cast<Index>(i))) d.q[i] = d.zeta[i] + planetary(i);
    } else {
      for (std::size_t i = 0; i < nc; ++i) {
        const bool bc = m.is_boundary_cell(static_cast<Index>(i));
        d.zeta[i] = kind_ == SchemeKind::IVFV2 && bc ? 0.0 : d.q[i] - planetary(i);
      }
    }
    d.q_hat = edge_pv(d.q, false);
  }
  d.psi_tilde = remap_cell_to_vertex(m, d.psi);
  d.u = skew_gradient(m, d.psi_tilde);
  d.u *= params_.velocity_scale();
  return d;
}

CellField QgModel::tendency(const SchemeState& state) const {
  if (!state.diagnostics) throw std::logic_error("tendency requested without diagnostics");
  if (!(state.diagnostics->source == state.prognostic))
    throw std::logic_error("tendency requested with stale diagnostics");
  return tendency(*state.diagnostics);
}

CellField QgModel::tendency(const SchemeDiagnostics& d) const {
  if (kind_ == SchemeKind::VSFV1) throw std::logic_error("VSFV1 has no explicit PV tendency");
  return tendency_rows(d, kind_ != SchemeKind::IVFV1, kind_ == SchemeKind::VSFV2);
}

CellField QgModel::stream_tendency(const CellField& psi) const {
  const auto& m = *mesh_;
  const std::size_t nc = m.num_cells();
  if (psi.size() != nc) throw std::invalid_argument("stream function length does not match the mesh");
  SchemeDiagnostics d;
  d.psi = psi;
  const CellField lap = laplacian(m, psi);
  d.zeta = CellField(nc);
  d.q = CellField(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    d.zeta[i] = params_.vorticity_scale() * lap[i];
    d.q[i] = d.zeta[i] + params_.beta * m.cell_center(static_cast<Index>(i)).y -
             params_.f0_over_H() * (psi[i] - params_.bottom(i));
  }
  d.q_hat = edge_pv(d.q, false);
  d.psi_tilde = remap_cell_to_vertex(m, psi);
  d.u = skew_gradient(m, d.psi_tilde);
  d.u *= params_.velocity_scale();
  return tendency_rows(d, true, true);
}

CellField QgModel::tendency_rows(const SchemeDiagnostics& d, bool interior_only, bool viscous) const {
  const auto& m = *mesh_;
  const std::size_t nc = m.num_cells();
  CellField dq = flux_divergence(m, d.u, d.q_hat);
  CellField diffusion;
  if (viscous && params_.mu != 0.0) diffusion = laplacian(m, d.zeta);
  for (std::size_t i = 0; i < nc; ++i) {
    const bool bc = m.is_boundary_cell(static_cast<Index>(i));
    if (bc && interior_only) {
      dq[i] = 0.0;
      continue;
    }
    double v = -dq[i] + forcing_.wind_curl[i] - params_.alpha * d.zeta[i];
    if (diffusion.size()) v += params_.mu * diffusion[i];
    dq[i] = v;
  }
  return dq;
}

SchemeState QgModel::initial_state(CellField prognostic, double time) const {
  SchemeState s;
  s.time = time;
  s.prognostic = std::move(prognostic);
  if (kind_ == SchemeKind::IVFV2) {
    s.diagnostics = diagnose(s.prognostic);
    reset_boundary_pv(*mesh_, params_, s.diagnostics->psi, s.prognostic);
  }
  if (kind_ == SchemeKind::VSFV2 && options_.boundary_pv_update) {
    s.diagnostics = diagnose(s.prognostic);
    s.prognostic = s.diagnostics->q;
  }
  s.diagnostics = diagnose(s.prognostic);
  return s;
}

Eigen::VectorXd QgModel::semi_implicit_rhs(const SchemeDiagnostics& d, double dt) const {
  const auto& m = *mesh_;
  const std::size_t nc = m.num_cells();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Index>(nc + 1));
  const CellField adv = flux_divergence(m, d.u, d.q_hat);
  const CellField lap = laplacian(m, d.psi);
  for (std::size_t i = 0; i < nc; ++i) {
    if (m.cell_class(static_cast<Index>(i)) != CellClass::Interior) continue;
    b[static_cast<Index>(i)] = dt * forcing_.wind_curl[i] - dt * adv[i] + params_.g_over_f0() * lap[i] -
                               params_.f0_over_H() * d.psi[i];
  }
  return b;
}

void QgModel::step(SchemeState& state, double dt) {
  if (!(dt > 0.0)) throw SolverError("time step must be positive");
  const auto& m = *mesh_;
  if (kind_ == SchemeKind::VSFV1) {
    if (!state.diagnostics || !(state.diagnostics->source == state.prognostic))
      state.diagnostics = diagnose(state.prognostic);
    if (!semi_implicit_ || semi_implicit_dt_ != dt) {
      semi_implicit_ = std::make_unique<DirectSolver>(assemble_semi_implicit_system(m, params_, dt).A);
      semi_implicit_dt_ = dt;
    }
    const Eigen::VectorXd x = semi_implicit_->solve(semi_implicit_rhs(*state.diagnostics, dt));
    const std::size_t nc = m.num_cells();
    const double l = x[static_cast<Index>(nc)];
    CellField psi(nc);
    for (std::size_t i = 0; i < nc; ++i)
      psi[i] = m.cell_class(static_cast<Index>(i)) == CellClass::Interior ? x[static_cast<Index>(i)] : l;
    for (double v : psi.values)
      if (!std::isfinite(v)) throw SolverError("semi-implicit step produced a non-finite stream function");
    state.prognostic = std::move(psi);
    state.time += dt;
    state.diagnostics = diagnose(state.prognostic);
    return;
  }

  const Tendency f = [this](const CellField& q, double) { return tendency(diagnose(q)); };
  SchemeState next = rk4_step(f, state, dt);
  auto d = diagnose(next.prognostic);
  if (kind_ == SchemeKind::IVFV2) {
    reset_boundary_pv(m, params_, d.psi, next.prognostic);
    d = diagnose(next.prognostic);
  } else if (kind_ == SchemeKind::VSFV2 && options_.boundary_pv_update) {
    next.prognostic = d.q;
    d.source = next.prognostic;
  }
  next.diagnostics = std::move(d);
  state = std::move(next);
}

SchemeState rk4_step(const Tendency& tendency, const SchemeState& state, double dt) {
  if (!(dt > 0.0)) throw SolverError("time step must be positive");
  const CellField& q0 = state.prognostic;
  const std::size_t n = q0.size();
  auto check = [](const CellField& k, int stage) {
    for (double v : k.values)
      if (!std::isfinite(v)) throw SolverError("non-finite value at RK4 stage " + std::to_string(stage));
  };
  auto axpy = [n](const CellField& x, double a, const CellField& k) {
    CellField y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * k[i];
    return y;
  };
  const double t = state.time;
  const CellField k1 = tendency(q0, t);
  check(k1, 1);
  const CellField k2 = tendency(axpy(q0, 0.5 * dt, k1), t + 0.5 * dt);
  check(k2, 2);
  const CellField k3 = tendency(axpy(q0, 0.5 * dt, k2), t + 0.5 * dt);
  check(k3, 3);
  const CellField k4 = tendency(axpy(q0, dt, k3), t + dt);
  check(k4, 4);
  SchemeState out;
  out.time = t + dt;
  out.prognostic = CellField(n);
  for (std::size_t i = 0; i < n; ++i)
    out.prognostic[i] = q0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

namespace {

CellField single_tendency(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                          const SchemeState& state, SchemeKind kind) {
  const QgModel model(mesh, params, forcing, kind);
  if (!state.diagnostics) throw std::logic_error("tendency requested without diagnostics");
  return model.tendency(state);
}

}  // namespace

SchemeDiagnostics diagnose_ivfv1(const PrimalDualMesh& mesh, const PhysicalParams& params, const CellField& q) {
  return QgModel(mesh, params, {}, SchemeKind::IVFV1).diagnose(q);
}

CellField tendency_ivfv1(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                         const SchemeState& state) {
  return single_tendency(mesh, params, forcing, state, SchemeKind::IVFV1);
}

CellField tendency_ivfv2(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                         const SchemeState& state) {
  return single_tendency(mesh, params, forcing, state, SchemeKind::IVFV2);
}

CellField tendency_vsfv2(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                         const SchemeState& state) {
  return single_tendency(mesh, params, forcing, state, SchemeKind::VSFV2);
}

void reset_boundary_pv(const PrimalDualMesh& mesh, const PhysicalParams& params, const CellField& psi, CellField& q) {
  for (std::size_t i = 0; i < mesh.num_cells(); ++i) {
    const Index c = static_cast<Index>(i);
    if (mesh.is_boundary_cell(c))
      q[i] = params.beta * mesh.cell_center(c).y - params.f0_over_H() * (psi[i] - params.bottom(i));
  }
}

SchemeState step_vsfv1(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                       const SchemeState& state, double dt) {
  QgModel model(mesh, params, forcing, SchemeKind::VSFV1);
  SchemeState next = state;
  model.step(next, dt);
  return next;
}

}  // namespace qgfv
