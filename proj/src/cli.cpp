#include "qgfv/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "qgfv/cases.hpp"
#include "qgfv/diagnostics.hpp"

namespace qgfv::cli {

namespace {

void configure_logging() {
  const char* env = std::getenv("QGFV_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::info);
  if (level != "error" && level != "info" && level != "debug")
    spdlog::warn("QGFV_LOG='{}' is not one of error, info, debug; using info", level);
}

std::string real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string hex(std::uint64_t x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void write_cell_csv(const std::filesystem::path& path, const PrimalDualMesh& mesh, const CellField& f) {
  std::ostringstream os;
  os << "cell_id,x,y,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec2 p = mesh.cell_center(static_cast<Index>(i));
    os << i << ',' << real(p.x) << ',' << real(p.y) << ',' << real(f[i] + 0.0) << '\n';  // +0.0 folds -0
  }
  write_file_atomically(path, os.str());
}

std::string snapshot_name(const char* stem, std::uint64_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06llu.csv", stem, static_cast<unsigned long long>(step));
  return buf;
}

MeshKind validation_kind(const CaseConfig& c) {
  return c.mesh.kind == MeshSpec::Kind::Quad ? MeshKind::Structured : MeshKind::Cvt;
}

void make_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

struct Manifest {
  std::string command;
  std::filesystem::path config;
  const CaseConfig* resolved = nullptr;
  std::uint64_t checksum = 0;
  std::size_t cells = 0;
  double start_time = 0.0, end_time = 0.0;
  std::uint64_t steps_completed = 0;
  std::vector<std::string> extra;  // "key = value" lines
  std::vector<std::string> outputs;
  int exit_status = kOk;
  std::string message;

  std::string text() const {
    std::ostringstream os;
    os << "qgfv manifest v1\n"
       << "command = " << command << '\n'
       << "config = " << config.string() << '\n'
       << "case = " << case_name(resolved->kind) << '\n'
       << "scheme = " << scheme_name(resolved->scheme) << '\n'
       << "mesh_checksum = " << hex(checksum) << '\n'
       << "cells = " << cells << '\n'
       << "start_time = " << real(start_time) << '\n'
       << "end_time = " << real(end_time) << '\n'
       << "steps_completed = " << steps_completed << '\n';
    for (const auto& line : extra) os << line << '\n';
    os << "exit_status = " << exit_status << '\n';
    if (!message.empty()) os << "message = " << message << '\n';
    for (const auto& o : outputs) os << "output = " << o << '\n';
    os << "[config]\n" << format_case_config(*resolved);
    return os.str();
  }
};

struct LoadedCase {
  CaseConfig config;
  PrimalDualMesh mesh;
};

// `valid` is false when the mesh fails validation; the report goes to the log
LoadedCase load_case(const std::filesystem::path& config_file, bool& valid) {
  CaseConfig c = load_case_config(config_file);
  PrimalDualMesh mesh = build_case_mesh(c, config_file.parent_path());
  const auto report = validate_mesh(mesh, validation_kind(c));
  valid = report.accepted();
  if (!valid) spdlog::error("mesh failed validation:\n{}", format_report(report));
  spdlog::info("{} cells, {} vertices, {} edges", mesh.num_cells(), mesh.num_vertices(), mesh.num_edges());
  return {std::move(c), std::move(mesh)};
}

}  // namespace

void write_file_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << text;
    os.flush();
    if (!os) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

int cmd_mesh_gen_quad(int nx, int ny, double Lx, double Ly, const std::filesystem::path& out_file) {
  if (nx < 2 || ny < 2) throw ConfigError("--quad needs at least 2 intervals in each direction");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("--quad extents must be positive");
  const auto mesh = build_quad_mesh(nx, ny, Lx, Ly);
  save_mesh(mesh, out_file);
  spdlog::info("wrote {} ({} cells)", out_file.string(), mesh.num_cells());
  return kOk;
}

int cmd_mesh_gen_cvt(const std::filesystem::path& polygon_file, int n, int iters, std::uint64_t seed,
                     const std::filesystem::path& out_file) {
  if (n < 4) throw ConfigError("--cvt needs at least 4 generators");
  if (iters < 0) throw ConfigError("--cvt iteration count must be non-negative");
  const Polygon domain = load_polygon(polygon_file);
  const auto mesh = build_cvt_mesh(domain, {n, iters, seed});
  save_mesh(mesh, out_file);
  spdlog::info("wrote {} ({} cells)", out_file.string(), mesh.num_cells());
  return kOk;
}

int cmd_mesh_validate(const std::filesystem::path& mesh_file, bool cvt_tolerances, std::ostream& out) {
  const auto mesh = load_mesh(mesh_file);
  const auto report = validate_mesh(mesh, cvt_tolerances ? MeshKind::Cvt : MeshKind::Structured);
  out << format_report(report);
  return report.accepted() ? kOk : kValidationFailed;
}

int cmd_run(const std::filesystem::path& config_file, const std::filesystem::path& out_dir) {
  bool valid = false;
  const auto [c, mesh] = load_case(config_file, valid);
  if (!valid) return kValidationFailed;
  if (c.kind == CaseKind::SteadyStommel || c.kind == CaseKind::SteadyMunk)
    throw ConfigError("case '" + std::string(case_name(c.kind)) + "' is solved with the steady command");

  const PhysicalParams& p = c.params;
  const Forcing forcing = c.tau0 != 0.0 ? wind_forcing(mesh, p, c.tau0, c.wind_sign) : Forcing{CellField(mesh.num_cells())};
  SchemeOptions options;
  options.boundary_pv_update = c.boundary_pv_update;
  QgModel model(mesh, p, forcing, c.scheme, options);

  CellField initial(mesh.num_cells());
  if (c.kind == CaseKind::Circular) {
    const auto flow = init_circular_flow(mesh, p);
    initial = c.scheme == SchemeKind::VSFV1 ? flow.psi : flow.q;
  } else if (c.scheme != SchemeKind::VSFV1) {
    for (std::size_t i = 0; i < initial.size(); ++i)
      initial[i] = p.beta * mesh.cell_center(static_cast<Index>(i)).y + p.f0_over_H() * p.bottom(i);
  }
  SchemeState state = model.initial_state(std::move(initial));

  make_out_dir(out_dir);
  Manifest manifest;
  manifest.command = "run";
  manifest.config = config_file;
  manifest.resolved = &c;
  manifest.checksum = mesh_checksum(mesh);
  manifest.cells = mesh.num_cells();
  manifest.start_time = state.time;

  std::ostringstream csv;
  write_csv_header(csv);
  PvEnvelope envelope;
  auto emit = [&](std::uint64_t step) {
    const auto rec = compute_diagnostics(mesh, state);
    envelope.update(rec);
    write_csv_row(csv, rec);
    for (const char* stem : {"psi", "q"}) {
      const std::string name = snapshot_name(stem, step);
      write_cell_csv(out_dir / name, mesh, stem[0] == 'p' ? state.diagnostics->psi : state.diagnostics->q);
      manifest.outputs.push_back(name);
    }
    spdlog::debug("step {} t = {} total PV = {}", step, rec.time, rec.total_pv);
  };

  emit(0);
  int status = kOk;
  for (std::uint64_t n = 1; n <= c.steps; ++n) {
    try {
      model.step(state, c.dt);
    } catch (const SolverError& e) {
      status = kSolverFailure;
      manifest.message = "solver failure at step " + std::to_string(n) + ": " + e.what();
      spdlog::error("{}", manifest.message);
      break;
    }
    manifest.steps_completed = n;
    if (n % c.output_every == 0 || n == c.steps) emit(n);
  }

  write_file_atomically(out_dir / "diagnostics.csv", csv.str());
  manifest.outputs.insert(manifest.outputs.begin(), "diagnostics.csv");
  manifest.end_time = state.time;
  manifest.exit_status = status;
  manifest.extra.push_back("pv_envelope_min = " + real(envelope.min));
  manifest.extra.push_back("pv_envelope_max = " + real(envelope.max));
  write_file_atomically(out_dir / "manifest.txt", manifest.text());
  spdlog::info("{} steps to t = {} s, outputs in {}", manifest.steps_completed, state.time, out_dir.string());
  return status;
}

int cmd_steady(const std::filesystem::path& config_file, const std::filesystem::path& out_dir) {
  bool valid = false;
  const auto [c, mesh] = load_case(config_file, valid);
  if (!valid) return kValidationFailed;
  if (c.kind != CaseKind::SteadyStommel && c.kind != CaseKind::SteadyMunk)
    throw ConfigError("steady needs case = steady_stommel or steady_munk");
  const SteadyMode mode = c.kind == CaseKind::SteadyStommel ? SteadyMode::Stommel : SteadyMode::Munk;

  make_out_dir(out_dir);
  Manifest manifest;
  manifest.command = "steady";
  manifest.config = config_file;
  manifest.resolved = &c;
  manifest.checksum = mesh_checksum(mesh);
  manifest.cells = mesh.num_cells();

  SteadyOptions opt;
  opt.method = c.steady_method;
  opt.dt = c.steady_dt;
  opt.max_steps = c.steps;
  SteadyResult result;
  try {
    result = steady_linear_solve(mesh, c.params, wind_forcing(mesh, c.params, c.tau0, c.wind_sign), mode, opt);
  } catch (const SolverError& e) {
    manifest.exit_status = kSolverFailure;
    manifest.message = e.what();
    write_file_atomically(out_dir / "manifest.txt", manifest.text());
    throw;
  }

  write_cell_csv(out_dir / "psi_steady.csv", mesh, result.psi);
  const auto report = boundary_layer_report(mesh, result.psi);
  std::string text = format_boundary_layer_report(report);
  text += "boundary_value = " + real(result.l) + '\n';
  text += "relaxation_steps = " + std::to_string(result.steps) + '\n';
  text += "relative_residual = " + real(result.residual) + '\n';
  write_file_atomically(out_dir / "boundary_layer.txt", text);

  manifest.steps_completed = result.steps;
  manifest.outputs = {"psi_steady.csv", "boundary_layer.txt"};
  manifest.extra.push_back("west_east_ratio = " + real(report.ratio));
  write_file_atomically(out_dir / "manifest.txt", manifest.text());
  spdlog::info("steady {} solve: west/east gradient ratio {}", case_name(c.kind), report.ratio);
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"Quasi-geostrophic finite-volume model on primal-dual meshes", "qgfv"};
  app.require_subcommand(1);

  auto* mesh_cmd = app.add_subcommand("mesh", "generate or validate meshes");
  mesh_cmd->require_subcommand(1);
  auto* gen = mesh_cmd->add_subcommand("gen", "write a qgmesh v1 file");
  std::vector<std::string> quad, cvt;
  std::string gen_out;
  auto* quad_opt = gen->add_option("--quad", quad, "nx ny Lx Ly")->expected(4);
  auto* cvt_opt = gen->add_option("--cvt", cvt, "polygon_file n iters seed")->expected(4);
  quad_opt->excludes(cvt_opt);
  gen->add_option("-o,--output", gen_out, "mesh file to write")->required();
  auto* validate = mesh_cmd->add_subcommand("validate", "check a mesh file");
  std::string validate_file;
  bool cvt_tol = false;
  validate->add_option("file", validate_file)->required();
  validate->add_flag("--cvt", cvt_tol, "use the looser orthogonality tolerance of generated CVT meshes");

  std::string config, out_dir = "out";
  auto* run_cmd = app.add_subcommand("run", "time-step a case");
  run_cmd->add_option("config", config)->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  auto* steady_cmd = app.add_subcommand("steady", "solve a steady linear case");
  steady_cmd->add_option("config", config)->required();
  steady_cmd->add_option("--out", out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qgfv: " << e.what() << '\n';
    return kBadArguments;
  }

  auto as_int = [](const std::string& s, const char* what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || v < 0 || v > 100000000) throw ConfigError(std::string(what) + " '" + s + "' is not a valid count");
    return v;
  };
  auto as_real = [](const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || !std::isfinite(v)) throw ConfigError(std::string(what) + " '" + s + "' is not a number");
    return v;
  };

  try {
    if (gen->parsed()) {
      if (!quad.empty())
        return cmd_mesh_gen_quad(static_cast<int>(as_int(quad[0], "nx")), static_cast<int>(as_int(quad[1], "ny")),
                                 as_real(quad[2], "Lx"), as_real(quad[3], "Ly"), gen_out);
      if (!cvt.empty())
        return cmd_mesh_gen_cvt(cvt[0], static_cast<int>(as_int(cvt[1], "n")), static_cast<int>(as_int(cvt[2], "iters")),
                                static_cast<std::uint64_t>(as_int(cvt[3], "seed")), gen_out);
      throw ConfigError("mesh gen needs --quad or --cvt");
    }
    if (validate->parsed()) return cmd_mesh_validate(validate_file, cvt_tol, out);
    if (run_cmd->parsed()) return cmd_run(config, out_dir);
    if (steady_cmd->parsed()) return cmd_steady(config, out_dir);
  } catch (const ConfigError& e) {
    err << "qgfv: " << e.what() << '\n';
    return kBadArguments;
  } catch (const MeshFormatError& e) {
    err << "qgfv: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    err << "qgfv: " << e.what() << '\n';
    return kIoError;
  } catch (const MeshError& e) {
    err << "qgfv: " << e.what() << '\n';
    return kValidationFailed;
  } catch (const SolverError& e) {
    err << "qgfv: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "qgfv: unexpected error: " << e.what() << '\n';
    return kSolverFailure;
  }
  err << "qgfv: no command given\n";
  return kBadArguments;
}

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace qgfv::cli
