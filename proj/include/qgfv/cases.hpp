#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>

#include "qgfv/cvt.hpp"
#include "qgfv/schemes.hpp"

namespace qgfv {

inline constexpr double kEarthRadius = 6.371e6;  // m

enum class CaseKind { Circular, WindBasin, SteadyStommel, SteadyMunk };
enum class SteadyMode { Stommel, Munk };
enum class SteadyMethod { Direct, Relaxation };

std::string_view case_name(CaseKind kind);

struct MeshSpec {
  enum class Kind { None, File, Quad, Cvt } kind = Kind::None;
  std::filesystem::path file;
  int nx = 0, ny = 0;
  double Lx = 0.0, Ly = 0.0;
  CvtOptions cvt;
};

struct CaseConfig {
  CaseKind kind = CaseKind::Circular;
  SchemeKind scheme = SchemeKind::IVFV1;
  MeshSpec mesh;
  /// Rectangle for mesh.cvt; defaults to a square of side R*pi/6.
  double domain_Lx = kEarthRadius * std::numbers::pi / 6.0;
  double domain_Ly = kEarthRadius * std::numbers::pi / 6.0;
  std::filesystem::path domain_file;  // polygon for mesh.cvt, overrides the rectangle
  double dt = 1350.0;
  std::uint64_t steps = 0;
  std::uint64_t output_every = 1;
  PhysicalParams params;
  double tau0 = 0.0;        // m^2 s^-2
  double wind_sign = -1.0;  // -1 gives the anticyclonic gyre
  bool boundary_pv_update = true;
  SteadyMethod steady_method = SteadyMethod::Direct;
  double steady_dt = 0.0;  // relaxation step; 0 picks one from the coefficients
};

/// key = value lines, '#' comments. Unknown or repeated keys, malformed values and
/// missing mesh sources throw ConfigError naming the line. Case defaults are
/// applied to every key the file leaves unset.
CaseConfig parse_case_config(std::istream& is);
CaseConfig load_case_config(const std::filesystem::path& path);
/// Every key with its resolved value; parsing the text gives back the same config.
std::string format_case_config(const CaseConfig& config);

/// Relative paths in the config resolve against `base_dir`.
PrimalDualMesh build_case_mesh(const CaseConfig& config, const std::filesystem::path& base_dir = {});

struct Box {
  double xmin, xmax, ymin, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};
/// Bounding box of the cell centers.
Box mesh_box(const PrimalDualMesh& mesh);

/// e^{-d^2} (1 - tanh(20 (d - 1.5))).
double circular_stream_function(double d);

struct CircularFlow {
  CellField psi;  // zero mass, constant on BC
  CellField q;
};

/// Isolated eddy at the basin center, its widths taken from a 30-degree
/// mid-latitude section and scaled to the basin. Throws ConfigError when the basin is
/// too small for the stream function to flatten out before the boundary.
CircularFlow init_circular_flow(const PrimalDualMesh& mesh, const PhysicalParams& params);

/// tau(y) = tau0 cos(pi (y - y0)/dy).
double wind_stress(double y, double y0, double dy, double tau0);

/// [curl tau]_i = sign tau0 (pi/dy) sin(pi (y_i - y0)/dy), with y0 and dy the
/// southern edge and height of the basin.
CellField wind_curl_field(const PrimalDualMesh& mesh, double tau0, double wind_sign);
Forcing wind_forcing(const PrimalDualMesh& mesh, const PhysicalParams& params, double tau0, double wind_sign);

struct SteadyOptions {
  SteadyMethod method = SteadyMethod::Direct;
  double dt = 0.0;  // relaxation only; 0 picks one
  std::uint64_t max_steps = 200000;
  double t_ref = 86400.0;
};

struct SteadyResult {
  CellField psi;
  double l = 0.0;
  std::uint64_t steps = 0;
  double residual = 0.0;  // max |steady tendency| on IC over max |forcing|
};

/// Steady linear problem: transport of beta y only, wind, drag, and for Munk mode
/// lateral viscosity with zeta = (g/f0) Lap(psi) on all cells. Stommel mode drops
/// the viscosity from `params`; Munk mode requires mu > 0.
SteadyResult steady_linear_solve(const PrimalDualMesh& mesh, PhysicalParams params, const Forcing& forcing,
                                 SteadyMode mode, const SteadyOptions& options = {});

/// Steady tendency on IC (zero elsewhere) of the linear problem at `psi`.
CellField steady_residual(const PrimalDualMesh& mesh, const PhysicalParams& params, const Forcing& forcing,
                          const CellField& psi);

struct BoundaryLayerReport {
  double west_max_gradient = 0.0;  // max |dpsi/dx| within the western 10% of the basin
  double east_max_gradient = 0.0;
  double ratio = 0.0;
  double west_width = 0.0;  // distance from the wall where |dpsi/dx| drops to 1/e of its peak
  double east_width = 0.0;
};

/// Uses the edges whose normals lie within 25 degrees of the x axis.
BoundaryLayerReport boundary_layer_report(const PrimalDualMesh& mesh, const CellField& psi);
std::string format_boundary_layer_report(const BoundaryLayerReport& r);

}  // namespace qgfv
