#include "qgfv/cases.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace qgfv {

std::string_view case_name(CaseKind kind) {
  switch (kind) {
    case CaseKind::Circular: return "circular";
    case CaseKind::WindBasin: return "wind_basin";
    case CaseKind::SteadyStommel: return "steady_stommel";
    case CaseKind::SteadyMunk: return "steady_munk";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.push_back(trim(std::string_view(s).substr(start, p == std::string::npos ? std::string::npos : p - start)));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

struct LineError {
  std::size_t line;
  std::string key;
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line) + " (" + key + "): " + what);
  }
};

double to_double(const std::string& v, const LineError& where) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) where.fail("'" + v + "' is not a finite number");
  return x;
}

std::uint64_t to_count(const std::string& v, const LineError& where) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) where.fail("'" + v + "' is not a non-negative integer");
  return x;
}

bool to_bool(const std::string& v, const LineError& where) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  where.fail("'" + v + "' is not a boolean");
}

std::vector<std::string> fields(const std::string& v, std::size_t n, const LineError& where) {
  auto f = split(v, ',');
  if (f.size() != n) where.fail("expected " + std::to_string(n) + " comma-separated values");
  return f;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CaseDefaults {
  SchemeKind scheme;
  double alpha, mu, tau0;
  std::uint64_t steps;
};

CaseDefaults defaults_for(CaseKind k) {
  switch (k) {
    case CaseKind::Circular: return {SchemeKind::IVFV1, 0.0, 0.0, 0.0, 1000};
    case CaseKind::WindBasin: return {SchemeKind::VSFV2, 3e-8, 40.0, 1e-4, 1000};
    case CaseKind::SteadyStommel: return {SchemeKind::VSFV2, 5e-8, 0.0, 1e-4, 200000};
    case CaseKind::SteadyMunk: return {SchemeKind::VSFV2, 5e-8, 100.0, 1e-4, 200000};
  }
  return {};
}

}  // namespace

CaseConfig parse_case_config(std::istream& is) {
  CaseConfig c;
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) LineError{lineno, line}.fail("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) LineError{lineno, line}.fail("empty key");
    if (value.empty()) LineError{lineno, key}.fail("empty value");
    if (!kv.emplace(key, std::make_pair(value, lineno)).second) LineError{lineno, key}.fail("key given twice");
  }

  auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, LineError>> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto out = std::make_pair(it->second.first, LineError{it->second.second, key});
    kv.erase(it);
    return out;
  };

  if (auto v = take("case")) {
    bool found = false;
    for (auto k : {CaseKind::Circular, CaseKind::WindBasin, CaseKind::SteadyStommel, CaseKind::SteadyMunk})
      if (v->first == case_name(k)) c.kind = k, found = true;
    if (!found) v->second.fail("unknown case '" + v->first + "'");
  }
  const CaseDefaults d = defaults_for(c.kind);
  c.scheme = d.scheme;
  c.params.alpha = d.alpha;
  c.params.mu = d.mu;
  c.tau0 = d.tau0;
  c.steps = d.steps;

  if (auto v = take("scheme")) {
    try {
      c.scheme = parse_scheme(v->first);
    } catch (const ConfigError& e) {
      v->second.fail(e.what());
    }
  }

  int sources = 0;
  if (auto v = take("mesh_file")) {
    c.mesh.kind = MeshSpec::Kind::File;
    c.mesh.file = v->first;
    ++sources;
  }
  if (auto v = take("mesh.quad")) {
    const auto f = fields(v->first, 4, v->second);
    c.mesh.kind = MeshSpec::Kind::Quad;
    const auto nx = to_count(f[0], v->second), ny = to_count(f[1], v->second);
    if (nx < 2 || ny < 2 || nx > 100000 || ny > 100000) v->second.fail("need at least 2 intervals in each direction");
    c.mesh.nx = static_cast<int>(nx);
    c.mesh.ny = static_cast<int>(ny);
    c.mesh.Lx = to_double(f[2], v->second);
    c.mesh.Ly = to_double(f[3], v->second);
    if (!(c.mesh.Lx > 0.0 && c.mesh.Ly > 0.0)) v->second.fail("basin extents must be positive");
    ++sources;
  }
  if (auto v = take("mesh.cvt")) {
    const auto f = fields(v->first, 3, v->second);
    c.mesh.kind = MeshSpec::Kind::Cvt;
    const auto n = to_count(f[0], v->second), it = to_count(f[1], v->second);
    if (n < 4 || n > 10000000 || it > 100000000) v->second.fail("generator or iteration count out of range");
    c.mesh.cvt.n_generators = static_cast<int>(n);
    c.mesh.cvt.lloyd_iterations = static_cast<int>(it);
    c.mesh.cvt.seed = to_count(f[2], v->second);
    ++sources;
  }
  if (sources != 1)
    throw ConfigError(sources == 0 ? "config needs one of mesh_file, mesh.quad or mesh.cvt"
                                   : "config gives more than one mesh source");
  if (auto v = take("domain")) {
    const auto f = fields(v->first, 2, v->second);
    c.domain_Lx = to_double(f[0], v->second);
    c.domain_Ly = to_double(f[1], v->second);
    if (!(c.domain_Lx > 0.0 && c.domain_Ly > 0.0)) v->second.fail("domain extents must be positive");
  }
  if (auto v = take("domain_file")) c.domain_file = v->first;

  if (auto v = take("dt")) {
    c.dt = to_double(v->first, v->second);
    if (!(c.dt > 0.0)) v->second.fail("dt must be positive");
  }
  if (auto v = take("steps")) c.steps = to_count(v->first, v->second);
  if (auto v = take("output_every")) {
    c.output_every = to_count(v->first, v->second);
    if (c.output_every < 1) v->second.fail("output cadence must be at least 1");
  }
  const std::pair<const char*, double*> reals[] = {{"f0", &c.params.f0}, {"beta", &c.params.beta},
                                                   {"g", &c.params.g},   {"H", &c.params.H},
                                                   {"alpha", &c.params.alpha}, {"mu", &c.params.mu},
                                                   {"tau0", &c.tau0}};
  for (const auto& [key, dst] : reals)
    if (auto v = take(key)) *dst = to_double(v->first, v->second);
  if (auto v = take("wind_sign")) {
    c.wind_sign = to_double(v->first, v->second);
    if (c.wind_sign != 1.0 && c.wind_sign != -1.0) v->second.fail("wind_sign must be 1 or -1");
  }
  if (auto v = take("velocity_gf0_factor")) c.params.velocity_gf0_factor = to_bool(v->first, v->second);
  if (auto v = take("vorticity_gf0_factor")) c.params.vorticity_gf0_factor = to_bool(v->first, v->second);
  if (auto v = take("boundary_pv_update")) c.boundary_pv_update = to_bool(v->first, v->second);
  if (auto v = take("steady.method")) {
    if (v->first == "direct") c.steady_method = SteadyMethod::Direct;
    else if (v->first == "relaxation") c.steady_method = SteadyMethod::Relaxation;
    else v->second.fail("expected direct or relaxation");
  }
  if (auto v = take("steady.dt")) {
    c.steady_dt = to_double(v->first, v->second);
    if (c.steady_dt < 0.0) v->second.fail("steady.dt must be non-negative");
  }

  if (!kv.empty()) {
    const auto& [key, val] = *kv.begin();
    LineError{val.second, key}.fail("unknown key");
  }
  c.params.validate(0);
  return c;
}

CaseConfig load_case_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_case_config(in);
}

std::string format_case_config(const CaseConfig& c) {
  std::ostringstream os;
  os << "case = " << case_name(c.kind) << '\n';
  os << "scheme = " << scheme_name(c.scheme) << '\n';
  switch (c.mesh.kind) {
    case MeshSpec::Kind::File: os << "mesh_file = " << c.mesh.file.string() << '\n'; break;
    case MeshSpec::Kind::Quad:
      os << "mesh.quad = " << c.mesh.nx << ',' << c.mesh.ny << ',' << num(c.mesh.Lx) << ',' << num(c.mesh.Ly) << '\n';
      break;
    case MeshSpec::Kind::Cvt:
      os << "mesh.cvt = " << c.mesh.cvt.n_generators << ',' << c.mesh.cvt.lloyd_iterations << ',' << c.mesh.cvt.seed
         << '\n';
      os << "domain = " << num(c.domain_Lx) << ',' << num(c.domain_Ly) << '\n';
      if (!c.domain_file.empty()) os << "domain_file = " << c.domain_file.string() << '\n';
      break;
    case MeshSpec::Kind::None: break;
  }
  os << "dt = " << num(c.dt) << '\n';
  os << "steps = " << c.steps << '\n';
  os << "output_every = " << c.output_every << '\n';
  os << "f0 = " << num(c.params.f0) << '\n';
  os << "beta = " << num(c.params.beta) << '\n';
  os << "g = " << num(c.params.g) << '\n';
  os << "H = " << num(c.params.H) << '\n';
  os << "alpha = " << num(c.params.alpha) << '\n';
  os << "mu = " << num(c.params.mu) << '\n';
  os << "tau0 = " << num(c.tau0) << '\n';
  os << "wind_sign = " << num(c.wind_sign) << '\n';
  os << "velocity_gf0_factor = " << (c.params.velocity_gf0_factor ? "true" : "false") << '\n';
  os << "vorticity_gf0_factor = " << (c.params.vorticity_gf0_factor ? "true" : "false") << '\n';
  os << "boundary_pv_update = " << (c.boundary_pv_update ? "true" : "false") << '\n';
  os << "steady.method = " << (c.steady_method == SteadyMethod::Direct ? "direct" : "relaxation") << '\n';
  os << "steady.dt = " << num(c.steady_dt) << '\n';
  return os.str();
}

PrimalDualMesh build_case_mesh(const CaseConfig& c, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() || base_dir.empty() ? p : base_dir / p; };
  switch (c.mesh.kind) {
    case MeshSpec::Kind::File: return load_mesh(resolve(c.mesh.file));
    case MeshSpec::Kind::Quad: return build_quad_mesh(c.mesh.nx, c.mesh.ny, c.mesh.Lx, c.mesh.Ly);
    case MeshSpec::Kind::Cvt: {
      const Polygon domain =
          c.domain_file.empty() ? Polygon::rectangle(c.domain_Lx, c.domain_Ly) : load_polygon(resolve(c.domain_file));
      return build_cvt_mesh(domain, c.mesh.cvt);
    }
    case MeshSpec::Kind::None: break;
  }
  throw ConfigError("config has no mesh source");
}

Box mesh_box(const PrimalDualMesh& mesh) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < mesh.num_cells(); ++i) {
    const Vec2 p = mesh.cell_center(static_cast<Index>(i));
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

double circular_stream_function(double d) { return std::exp(-d * d) * (1.0 - std::tanh(20.0 * (d - 1.5))); }

CircularFlow init_circular_flow(const PrimalDualMesh& mesh, const PhysicalParams& params) {
  // The eddy sits in a 30 x 30 degree section centred at latitude 0.5088, with
  // half-widths 0.08688 (latitude) and 0.15 (longitude) radians; both are kept
  // as fractions of the basin.
  constexpr double section = std::numbers::pi / 6.0;
  const Box box = mesh_box(mesh);
  const double wy = 0.08688 / section * box.height();
  const double wx = 0.15 * std::cos(0.5088) / section * box.width();
  const double xc = 0.5 * (box.xmin + box.xmax), yc = 0.5 * (box.ymin + box.ymax);
  const std::size_t nc = mesh.num_cells();

  CircularFlow out{CellField(nc), CellField(nc)};
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    const Vec2 p = mesh.cell_center(static_cast<Index>(i));
    const double d = std::hypot((p.y - yc) / wy, (p.x - xc) / wx);
    out.psi[i] = circular_stream_function(d);
    peak = std::max(peak, std::abs(out.psi[i]));
    if (mesh.is_boundary_cell(static_cast<Index>(i))) edge = std::max(edge, std::abs(out.psi[i]));
  }
  if (edge > 1e-6 * peak)
    throw ConfigError("basin too small for the circular flow: boundary stream function reaches " +
                      std::to_string(edge / peak) + " of its peak");
  for (std::size_t i = 0; i < nc; ++i)
    if (mesh.is_boundary_cell(static_cast<Index>(i))) out.psi[i] = 0.0;

  // Shifting by the harmonic lift leaves q on IC unchanged and zeroes the mass,
  // so the constrained inversion of q returns this psi.
  const StreamfunctionSolver solver(mesh, params);
  const CellField ones(nc, 1.0);
  const double c = -inner_product_cell(mesh, out.psi, ones) / inner_product_cell(mesh, solver.psi2(), ones);
  for (std::size_t i = 0; i < nc; ++i) out.psi[i] += c * solver.psi2()[i];

  const CellField lap = laplacian(mesh, out.psi);
  for (std::size_t i = 0; i < nc; ++i)
    out.q[i] = params.g_over_f0() * lap[i] + params.beta * mesh.cell_center(static_cast<Index>(i)).y -
               params.f0_over_H() * (out.psi[i] - params.bottom(i));
  return out;
}

double wind_stress(double y, double y0, double dy, double tau0) {
  return tau0 * std::cos(std::numbers::pi * (y - y0) / dy);
}

CellField wind_curl_field(const PrimalDualMesh& mesh, double tau0, double wind_sign) {
  const Box box = mesh_box(mesh);
  const double dy = box.height();
  CellField curl(mesh.num_cells());
  for (std::size_t i = 0; i < curl.size(); ++i) {
    const double y = mesh.cell_center(static_cast<Index>(i)).y;
    curl[i] = wind_sign * tau0 * std::numbers::pi / dy * std::sin(std::numbers::pi * (y - box.ymin) / dy);
  }
  return curl;
}

Forcing wind_forcing(const PrimalDualMesh& mesh, const PhysicalParams& params, double tau0, double wind_sign) {
  Forcing f{wind_curl_field(mesh, tau0, wind_sign)};
  f.wind_curl *= 1.0 / params.H;
  return f;
}

namespace {

QgModel linear_model(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing) {
  SchemeOptions opt;
  opt.boundary_pv_update = true;
  CellField planetary(mesh.num_cells());
  for (std::size_t i = 0; i < planetary.size(); ++i)
    planetary[i] = params.beta * mesh.cell_center(static_cast<Index>(i)).y;
  opt.frozen_transport_pv = std::move(planetary);
  return QgModel(mesh, params, forcing, SchemeKind::VSFV2, std::move(opt));
}

double interior_max(const PrimalDualMesh& mesh, const CellField& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!mesh.is_boundary_cell(static_cast<Index>(i))) m = std::max(m, std::abs(f[i]));
  return m;
}

double max_abs(const CellField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

// Cells within `radius` edge hops of `start`.
std::vector<Index> neighbourhood(const std::vector<std::vector<Index>>& adj, Index start, int radius,
                                 std::vector<int>& mark, int stamp) {
  std::vector<Index> out{start};
  mark[start] = stamp;
  std::size_t front = 0;
  for (int r = 0; r < radius; ++r) {
    const std::size_t end = out.size();
    for (; front < end; ++front)
      for (Index n : adj[out[front]])
        if (mark[n] != stamp) {
          mark[n] = stamp;
          out.push_back(n);
        }
  }
  return out;
}

SteadyResult direct_steady(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing) {
  const std::size_t nc = mesh.num_cells();
  const Index lcol = static_cast<Index>(nc);
  // Columns of the linear operator are probed through the scheme's own tendency.
  // A column touches rows within two edge hops (Laplacian of the vorticity, or
  // velocity from the remapped stream function); with a margin of three hops,
  // columns more than six hops apart share a probe.
  constexpr int reach = 3;
  std::vector<std::vector<Index>> adj(nc);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto [c0, c1] = mesh.cells(static_cast<Index>(e));
    adj[c0].push_back(c1);
    adj[c1].push_back(c0);
  }
  std::vector<int> mark(nc, -1), colour(nc, -1);
  int stamp = 0, ncolours = 0;
  std::vector<char> used;
  for (std::size_t j = 0; j < nc; ++j) {
    used.assign(static_cast<std::size_t>(ncolours) + 1, 0);
    for (Index k : neighbourhood(adj, static_cast<Index>(j), 2 * reach, mark, stamp++))
      if (colour[k] >= 0) used[static_cast<std::size_t>(colour[k])] = 1;
    const int c = static_cast<int>(std::find(used.begin(), used.end(), 0) - used.begin());
    colour[j] = c;
    ncolours = std::max(ncolours, c + 1);
  }
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(ncolours));
  for (std::size_t j = 0; j < nc; ++j) members[static_cast<std::size_t>(colour[j])].push_back(static_cast<Index>(j));

  const QgModel homogeneous = linear_model(mesh, params, Forcing{CellField(nc)});
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<Index> owner(nc, -1);
  for (const auto& group : members) {
    CellField probe(nc);
    for (Index j : group) {
      probe[j] = 1.0;
      for (Index i : neighbourhood(adj, j, reach, mark, stamp++)) owner[i] = j;
    }
    const CellField col = homogeneous.stream_tendency(probe);
    for (std::size_t i = 0; i < nc; ++i) {
      if (col[i] == 0.0 || mesh.is_boundary_cell(static_cast<Index>(i))) continue;
      if (owner[i] < 0) throw std::logic_error("steady operator reaches beyond its assumed stencil");
      trips.emplace_back(static_cast<Index>(i), owner[i], col[i]);
    }
    std::fill(owner.begin(), owner.end(), -1);
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(lcol + 1);
  for (std::size_t i = 0; i < nc; ++i) {
    const Index r = static_cast<Index>(i);
    if (mesh.is_boundary_cell(r)) {
      trips.emplace_back(r, r, 1.0);
      trips.emplace_back(r, lcol, -1.0);
    } else {
      b[r] = -forcing.wind_curl[i];
    }
    trips.emplace_back(lcol, r, mesh.cell_area(r) / mesh.total_area());
  }
  SparseMatrix A(lcol + 1, lcol + 1);
  A.setFromTriplets(trips.begin(), trips.end());
  const DirectSolver lu(A);
  Eigen::VectorXd x = lu.solve(b);
  // one refinement pass; the fourth-order viscous rows lose digits to cancellation
  const Eigen::VectorXd res = b - A * x;
  if (res.cwiseAbs().maxCoeff() > 0.0) x += lu.solve(res);
  SteadyResult r;
  r.l = x[lcol];
  r.psi = CellField(nc);
  for (std::size_t i = 0; i < nc; ++i) r.psi[i] = mesh.is_boundary_cell(static_cast<Index>(i)) ? r.l : x[static_cast<Index>(i)];
  return r;
}

SteadyResult relaxed_steady(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                            const SteadyOptions& opt) {
  QgModel model = linear_model(mesh, params, forcing);
  double dt = opt.dt;
  if (dt <= 0.0) {
    const Box box = mesh_box(mesh);
    const double h = mesh.mesh_size();
    const double rate = params.alpha + 16.0 * params.mu / (h * h) +
                        std::abs(params.beta) * std::max(box.width(), box.height()) / std::numbers::pi;
    dt = std::min(opt.t_ref, 1.0 / rate);
  }
  CellField rest(mesh.num_cells());
  for (std::size_t i = 0; i < rest.size(); ++i)
    rest[i] = params.beta * mesh.cell_center(static_cast<Index>(i)).y + params.f0_over_H() * params.bottom(i);
  SchemeState s = model.initial_state(rest);
  for (std::uint64_t n = 1; n <= opt.max_steps; ++n) {
    const CellField before = s.diagnostics->psi;
    model.step(s, dt);
    const CellField& psi = s.diagnostics->psi;
    double change = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) change = std::max(change, std::abs(psi[i] - before[i]));
    if (change / dt <= 1e-12 * max_abs(psi) / opt.t_ref) {
      SteadyResult r;
      r.psi = psi;
      r.l = s.diagnostics->l;
      r.steps = n;
      return r;
    }
  }
  throw SolverError("steady relaxation did not converge in " + std::to_string(opt.max_steps) + " steps");
}

}  // namespace

CellField steady_residual(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                          const CellField& psi) {
  return linear_model(mesh, params, forcing).stream_tendency(psi);
}

SteadyResult steady_linear_solve(const PrimalDualMesh& mesh, PhysicalParams params, const Forcing& forcing,
                                 SteadyMode mode, const SteadyOptions& options) {
  if (mode == SteadyMode::Stommel) params.mu = 0.0;
  else if (!(params.mu > 0.0)) throw ConfigError("Munk mode needs a positive viscosity");
  if (!(params.alpha > 0.0) && mode == SteadyMode::Stommel)
    throw ConfigError("Stommel mode needs a positive bottom drag");
  params.validate(mesh.num_cells());
  if (forcing.wind_curl.size() != mesh.num_cells()) throw ConfigError("forcing length does not match the mesh");

  SteadyResult r = options.method == SteadyMethod::Direct ? direct_steady(mesh, params, forcing)
                                                          : relaxed_steady(mesh, params, forcing, options);
  const double fscale = interior_max(mesh, forcing.wind_curl);
  const double res = interior_max(mesh, steady_residual(mesh, params, forcing, r.psi));
  r.residual = fscale > 0.0 ? res / fscale : res;
  return r;
}

BoundaryLayerReport boundary_layer_report(const PrimalDualMesh& mesh, const CellField& psi) {
  const Box box = mesh_box(mesh);
  const EdgeField grad = gradient(mesh, psi);
  const double cos_max = std::cos(25.0 * std::numbers::pi / 180.0);
  const double bin = 0.5 * mesh.mesh_size();
  const std::size_t nbins = static_cast<std::size_t>(std::ceil(0.5 * box.width() / bin)) + 1;
  std::vector<double> west(nbins, 0.0), east(nbins, 0.0);
  BoundaryLayerReport r;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Index ei = static_cast<Index>(e);
    const Vec2 n = mesh.normal(ei);
    if (std::abs(n.x) < cos_max) continue;
    const auto [c0, c1] = mesh.cells(ei);
    const double x = 0.5 * (mesh.cell_center(c0).x + mesh.cell_center(c1).x);
    const double g = std::abs(grad[e] * n.x);
    const double dw = x - box.xmin, de = box.xmax - x;
    if (dw <= 0.1 * box.width()) r.west_max_gradient = std::max(r.west_max_gradient, g);
    if (de <= 0.1 * box.width()) r.east_max_gradient = std::max(r.east_max_gradient, g);
    auto& profile = dw <= de ? west : east;
    double& slot = profile[std::min(nbins - 1, static_cast<std::size_t>(std::min(dw, de) / bin))];
    slot = std::max(slot, g);
  }
  r.ratio = r.east_max_gradient > 0.0 ? r.west_max_gradient / r.east_max_gradient
                                      : (r.west_max_gradient > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  // e-folding distance of the binned gradient profile past its peak
  auto width = [&](const std::vector<double>& p) {
    const auto peak = std::max_element(p.begin(), p.end());
    if (*peak == 0.0) return 0.0;
    const double target = *peak / std::exp(1.0);
    for (auto it = peak + 1; it != p.end(); ++it)
      if (*it <= target) {
        const double prev = *(it - 1);
        const double frac = prev > *it ? (prev - target) / (prev - *it) : 0.0;
        return bin * (static_cast<double>(it - p.begin()) - 0.5 + frac);
      }
    return 0.5 * box.width();
  };
  r.west_width = width(west);
  r.east_width = width(east);
  return r;
}

std::string format_boundary_layer_report(const BoundaryLayerReport& r) {
  std::ostringstream os;
  os << "west_max_gradient = " << num(r.west_max_gradient) << '\n'
     << "east_max_gradient = " << num(r.east_max_gradient) << '\n'
     << "west_east_ratio = " << num(r.ratio) << '\n'
     << "west_width = " << num(r.west_width) << '\n'
     << "east_width = " << num(r.east_width) << '\n';
  return os.str();
}

}  // namespace qgfv
