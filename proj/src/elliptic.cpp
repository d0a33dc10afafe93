#include "qgfv/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace qgfv {

void PhysicalParams::validate(std::size_t num_cells) const {
  if (!(f0 != 0.0) || !std::isfinite(f0)) throw ConfigError("f0 must be finite and nonzero");
  if (!(H > 0.0)) throw ConfigError("H must be positive");
  if (!(g > 0.0)) throw ConfigError("g must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (!(mu >= 0.0)) throw ConfigError("mu must be non-negative");
  if (!std::isfinite(beta)) throw ConfigError("beta must be finite");
  if (b.size() && b.size() != num_cells)
    throw ConfigError("bottom topography has " + std::to_string(b.size()) + " values for " +
                      std::to_string(num_cells) + " cells");
}

struct DirectSolver::Impl {
  SparseMatrix A;
  Eigen::SparseMatrix<double> Ac;  // column-major copy for the factorization
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

DirectSolver::DirectSolver(const SparseMatrix& A) : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw SolverError("matrix is not square");
  impl_->A = A;
  impl_->Ac = A;
  impl_->Ac.makeCompressed();
  if (A.rows() == 0) return;
  impl_->lu.analyzePattern(impl_->Ac);
  impl_->lu.factorize(impl_->Ac);
  if (impl_->lu.info() != Eigen::Success)
    throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage());
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b) const {
  if (b.size() != impl_->A.rows()) throw SolverError("right-hand side has the wrong length");
  if (b.size() == 0) return b;
  Eigen::VectorXd x = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed");
  // normwise backward error after scaling each row by its largest entry, so rows
  // of very different size (physics rows next to the area-weighted mass row) are
  // judged alike
  const Eigen::VectorXd r = impl_->A * x - b;
  double worst = 0.0, bscale = 0.0;
  for (Index i = 0; i < r.size(); ++i) {
    double rowmax = 0.0;
    for (SparseMatrix::InnerIterator it(impl_->A, i); it; ++it) rowmax = std::max(rowmax, std::abs(it.value()));
    if (rowmax == 0.0) rowmax = 1.0;
    worst = std::max(worst, std::abs(r[i]) / rowmax);
    bscale = std::max(bscale, std::abs(b[i]) / rowmax);
  }
  const double bound = 1e-10 * (x.cwiseAbs().maxCoeff() + bscale);
  if (!std::isfinite(worst) || !x.allFinite() || worst > bound) {
    std::ostringstream os;
    os << "direct solve scaled residual " << worst << " exceeds " << bound;
    throw SolverError(os.str());
  }
  return x;
}

LinearSystem assemble_helmholtz(const PrimalDualMesh& mesh, const PhysicalParams& params) {
  const std::size_t nc = mesh.num_cells();
  const SparseMatrix L = laplacian_matrix(mesh);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(L.nonZeros() + nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const Index r = static_cast<Index>(i);
    if (mesh.is_boundary_cell(r)) {
      trips.emplace_back(r, r, 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(L, r); it; ++it) trips.emplace_back(r, it.col(), params.g_over_f0() * it.value());
    trips.emplace_back(r, r, -params.f0_over_H());
  }
  LinearSystem s;
  s.A.resize(static_cast<Index>(nc), static_cast<Index>(nc));
  s.A.setFromTriplets(trips.begin(), trips.end());
  s.rhs = Eigen::VectorXd::Zero(static_cast<Index>(nc));
  s.num_cells = nc;
  return s;
}

namespace {

// Dirichlet values on BC rows (identity rows) move to the right-hand side.
CellField solve_with_boundary(const LinearSystem& sys, const CellField& rhs, double boundary_value) {
  Eigen::VectorXd b(static_cast<Index>(sys.num_cells));
  std::vector<bool> identity(sys.num_cells, true);
  for (std::size_t i = 0; i < sys.num_cells; ++i) {
    const Index r = static_cast<Index>(i);
    for (SparseMatrix::InnerIterator it(sys.A, r); it; ++it)
      if (it.col() != r ? it.value() != 0.0 : it.value() != 1.0) identity[i] = false;
    b[r] = identity[i] ? boundary_value : rhs[i];
  }
  const Eigen::VectorXd x = DirectSolver(sys.A).solve(b);
  CellField out(std::vector<double>(x.data(), x.data() + x.size()));
  // the LU may leave rounding noise on identity rows
  for (std::size_t i = 0; i < sys.num_cells; ++i)
    if (identity[i]) out[i] = boundary_value;
  return out;
}

}  // namespace

CellField solve_dirichlet_zero(const LinearSystem& helmholtz, const CellField& rhs) {
  if (rhs.size() != helmholtz.num_cells) throw SolverError("rhs length does not match the system");
  return solve_with_boundary(helmholtz, rhs, 0.0);
}

CellField solve_harmonic_lift(const LinearSystem& helmholtz) {
  return solve_with_boundary(helmholtz, CellField(helmholtz.num_cells), 1.0);
}

namespace {

SparseMatrix interior_block(const PrimalDualMesh& mesh, const PhysicalParams& params,
                            const std::vector<Index>& interior, const std::vector<Index>& slot,
                            SparseMatrix& coupling) {
  const SparseMatrix L = laplacian_matrix(mesh);
  const auto ni = static_cast<Index>(interior.size());
  std::vector<Index> bslot(mesh.num_cells(), -1);
  Index nb = 0;
  for (std::size_t i = 0; i < mesh.num_cells(); ++i)
    if (slot[i] < 0) bslot[i] = nb++;
  std::vector<Eigen::Triplet<double>> in, out;
  for (Index k = 0; k < ni; ++k) {
    const Index r = interior[k];
    for (SparseMatrix::InnerIterator it(L, r); it; ++it) {
      const double v = params.g_over_f0() * it.value();
      if (slot[it.col()] >= 0) in.emplace_back(k, slot[it.col()], v);
      else out.emplace_back(k, bslot[it.col()], v);
    }
    in.emplace_back(k, k, -params.f0_over_H());
  }
  SparseMatrix A(ni, ni);
  A.setFromTriplets(in.begin(), in.end());
  coupling.resize(ni, nb);
  coupling.setFromTriplets(out.begin(), out.end());
  return A;
}

}  // namespace

StreamfunctionSolver::StreamfunctionSolver(const PrimalDualMesh& mesh, const PhysicalParams& params)
    : mesh_(&mesh), params_(params), slot_(mesh.num_cells(), -1), lu_(SparseMatrix()) {
  params_.validate(mesh.num_cells());
  for (std::size_t i = 0; i < mesh.num_cells(); ++i)
    if (!mesh.is_boundary_cell(static_cast<Index>(i))) {
      slot_[i] = static_cast<Index>(interior_.size());
      interior_.push_back(static_cast<Index>(i));
    }
  lu_ = DirectSolver(interior_block(mesh, params_, interior_, slot_, coupling_));

  // psi2: one on BC, the interior block sees minus the coupling to the boundary
  psi2_ = CellField(mesh.num_cells(), 1.0);
  if (!interior_.empty()) {
    const Eigen::VectorXd b = -(coupling_ * Eigen::VectorXd::Ones(coupling_.cols()));
    const Eigen::VectorXd x = lu_.solve(b);
    for (std::size_t k = 0; k < interior_.size(); ++k) psi2_[interior_[k]] = x[static_cast<Index>(k)];
  }
  psi2_mass_ = inner_product_cell(mesh, psi2_, CellField(mesh.num_cells(), 1.0));
  if (!(psi2_mass_ > 0.0))
    throw SolverError("harmonic lift has non-positive mass; the discrete maximum principle fails on this mesh");
}

CellField StreamfunctionSolver::psi1(const CellField& rhs) const {
  if (rhs.size() != mesh_->num_cells()) throw SolverError("rhs length does not match the mesh");
  CellField out(mesh_->num_cells());
  if (interior_.empty()) return out;
  Eigen::VectorXd b(static_cast<Index>(interior_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) b[static_cast<Index>(k)] = rhs[interior_[k]];
  const Eigen::VectorXd x = lu_.solve(b);
  for (std::size_t k = 0; k < interior_.size(); ++k) out[interior_[k]] = x[static_cast<Index>(k)];
  return out;
}

CellField StreamfunctionSolver::rhs_from_pv(const CellField& q) const {
  if (q.size() != mesh_->num_cells()) throw SolverError("PV length does not match the mesh");
  CellField r(mesh_->num_cells());
  for (Index i : interior_)
    r[i] = q[i] - params_.beta * mesh_->cell_center(i).y - params_.f0_over_H() * params_.bottom(i);
  return r;
}

StreamSolution StreamfunctionSolver::solve(const CellField& q) const {
  StreamSolution s;
  s.psi = psi1(rhs_from_pv(q));
  const double m1 = inner_product_cell(*mesh_, s.psi, CellField(mesh_->num_cells(), 1.0));
  s.l = -m1 / psi2_mass_;
  for (std::size_t i = 0; i < s.psi.size(); ++i) s.psi[i] += s.l * psi2_[i];
  return s;
}

StreamSolution solve_constrained_streamfunction(const PrimalDualMesh& mesh, const PhysicalParams& params,
                                                const CellField& q) {
  return StreamfunctionSolver(mesh, params).solve(q);
}

LinearSystem assemble_semi_implicit_system(const PrimalDualMesh& mesh, const PhysicalParams& params, double dt) {
  if (!(dt > 0.0)) throw SolverError("time step must be positive");
  params.validate(mesh.num_cells());
  const std::size_t nc = mesh.num_cells();
  const SparseMatrix L = laplacian_matrix(mesh);
  const SparseMatrix L2 = (L * L).pruned();
  const double gf = params.g_over_f0();
  const Index lcol = static_cast<Index>(nc);

  std::vector<Eigen::Triplet<double>> trips;
  std::size_t physics_rows = 0, constraint_rows = 0;
  for (std::size_t i = 0; i < nc; ++i) {
    const Index r = static_cast<Index>(i);
    if (mesh.cell_class(r) != CellClass::Interior) {
      trips.emplace_back(r, r, 1.0);
      trips.emplace_back(r, lcol, -1.0);
      ++constraint_rows;
      continue;
    }
    ++physics_rows;
    if (params.mu != 0.0)
      for (SparseMatrix::InnerIterator it(L2, r); it; ++it) trips.emplace_back(r, it.col(), -params.mu * dt * gf * it.value());
    for (SparseMatrix::InnerIterator it(L, r); it; ++it)
      trips.emplace_back(r, it.col(), (1.0 + params.alpha * dt) * gf * it.value());
    trips.emplace_back(r, r, -params.f0_over_H());
  }
  for (std::size_t i = 0; i < nc; ++i) trips.emplace_back(lcol, static_cast<Index>(i), mesh.cell_area(static_cast<Index>(i)));
  if (physics_rows + constraint_rows + 1 != nc + 1)
    throw SolverError("semi-implicit system has " + std::to_string(physics_rows + constraint_rows + 1) +
                      " rows for " + std::to_string(nc + 1) + " unknowns");

  LinearSystem s;
  s.A.resize(lcol + 1, lcol + 1);
  s.A.setFromTriplets(trips.begin(), trips.end());
  s.rhs = Eigen::VectorXd::Zero(lcol + 1);
  s.num_cells = nc;
  s.has_scalar = true;
  return s;
}

Eigen::VectorXd linear_solve(const LinearSystem& system) {
  if (static_cast<std::size_t>(system.A.rows()) != system.size() || system.rhs.size() != system.A.rows())
    throw SolverError("system dimensions do not match its unknown layout");
  return DirectSolver(system.A).solve(system.rhs);
}

}  // namespace qgfv
