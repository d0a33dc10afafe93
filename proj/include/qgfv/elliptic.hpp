#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "qgfv/mesh.hpp"
#include "qgfv/operators.hpp"

namespace qgfv {

struct PhysicalParams {
  double f0 = 1e-4;     // s^-1
  double beta = 1.6e-11;  // m^-1 s^-1
  double g = 9.81;      // m s^-2
  double H = 4000.0;    // m
  double alpha = 0.0;   // bottom drag, s^-1
  double mu = 0.0;      // lateral viscosity, m^2 s^-1
  CellField b;          // bottom topography (m); empty means flat
  /// u = (g/f0) skew_grad(psi~) when set, otherwise u = skew_grad(psi~).
  bool velocity_gf0_factor = true;
  /// zeta = (g/f0) Lap(psi) in the viscous schemes when set, otherwise Lap(psi).
  bool vorticity_gf0_factor = true;

  double g_over_f0() const { return g / f0; }
  double f0_over_H() const { return f0 / H; }
  double velocity_scale() const { return velocity_gf0_factor ? g / f0 : 1.0; }
  double vorticity_scale() const { return vorticity_gf0_factor ? g / f0 : 1.0; }
  double bottom(std::size_t i) const { return b.size() ? b[i] : 0.0; }
  /// Throws ConfigError on f0 == 0, H <= 0, g <= 0, alpha < 0, mu < 0 or a
  /// topography of the wrong length.
  void validate(std::size_t num_cells) const;
};

/// Square sparse system. Unknowns are the cell values, followed by the common
/// boundary value l when `has_scalar` is set.
struct LinearSystem {
  SparseMatrix A;
  Eigen::VectorXd rhs;
  std::size_t num_cells = 0;
  bool has_scalar = false;

  std::size_t size() const { return num_cells + (has_scalar ? 1 : 0); }
};

/// Sparse LU factorization with a residual check on every solve.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& A);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Throws SolverError when the row-scaled residual exceeds 1e-10 of
  /// |x|_inf + |b|_inf (rows scaled by their largest entry).
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Rows i in IC: (g/f0)[Lap .]_i - (f0/H)(.)_i; rows i in BC: identity.
LinearSystem assemble_helmholtz(const PrimalDualMesh& mesh, const PhysicalParams& params);

/// psi1 with the Helmholtz operator applied to it equal to `rhs` on IC, zero on BC.
CellField solve_dirichlet_zero(const LinearSystem& helmholtz, const CellField& rhs);
/// psi2: zero right-hand side on IC, one on BC.
CellField solve_harmonic_lift(const LinearSystem& helmholtz);

struct StreamSolution {
  CellField psi;
  double l = 0.0;  // common boundary value
};

/// Caches the factorization of the interior Helmholtz block and the harmonic
/// lift, so each call costs one back-substitution.
class StreamfunctionSolver {
 public:
  StreamfunctionSolver(const PrimalDualMesh& mesh, const PhysicalParams& params);

  /// Helmholtz solve with zero boundary values; rhs entries on BC are ignored.
  CellField psi1(const CellField& rhs) const;
  const CellField& psi2() const { return psi2_; }
  /// psi = psi1 + l psi2 with l fixing the area-weighted mean at zero, where
  /// psi1 uses the right-hand side q - beta y - (f0/H) b.
  StreamSolution solve(const CellField& q) const;
  CellField rhs_from_pv(const CellField& q) const;

 private:
  const PrimalDualMesh* mesh_;
  PhysicalParams params_;
  std::vector<Index> interior_;   // cell index of each interior unknown
  std::vector<Index> slot_;       // interior unknown of each cell, or -1
  SparseMatrix coupling_;         // interior rows, boundary columns
  DirectSolver lu_;
  CellField psi2_;
  double psi2_mass_ = 0.0;
};

StreamSolution solve_constrained_streamfunction(const PrimalDualMesh& mesh, const PhysicalParams& params,
                                                const CellField& q);

/// Bordered semi-implicit Euler operator: rows in IC\BC1 carry
/// -mu dt (g/f0) Lap^2 + (1 + alpha dt)(g/f0) Lap - f0/H, rows in BC and BC1 carry
/// psi_i - l = 0, and the last row carries sum_i A_i psi_i = 0. The rhs is zero.
LinearSystem assemble_semi_implicit_system(const PrimalDualMesh& mesh, const PhysicalParams& params, double dt);

Eigen::VectorXd linear_solve(const LinearSystem& system);

}  // namespace qgfv
