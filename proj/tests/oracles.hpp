#pragma once

// Dense reference computations. Matrices are built column by column from the
// operator functions applied to unit vectors, so they share no assembly code
// with the sparse solvers under test.

#include <cmath>

#include <Eigen/Dense>

#include "qgfv/elliptic.hpp"
#include "qgfv/operators.hpp"
#include "qgfv/reference.hpp"

namespace oracles {

inline Eigen::MatrixXd dense_laplacian(const qgfv::PrimalDualMesh& m) {
  const auto n = static_cast<Eigen::Index>(m.num_cells());
  Eigen::MatrixXd L(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    qgfv::CellField e(m.num_cells());
    e[j] = 1.0;
    const auto col = qgfv::laplacian(m, e);
    for (Eigen::Index i = 0; i < n; ++i) L(i, j) = col[i];
  }
  return L;
}

inline Eigen::MatrixXd interior_block(const qgfv::PrimalDualMesh& m, const Eigen::MatrixXd& A) {
  std::vector<Eigen::Index> in;
  for (std::size_t i = 0; i < m.num_cells(); ++i)
    if (!m.is_boundary_cell(static_cast<qgfv::Index>(i))) in.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXd D(in.size(), in.size());
  for (std::size_t r = 0; r < in.size(); ++r)
    for (std::size_t c = 0; c < in.size(); ++c) D(r, c) = A(in[r], in[c]);
  return D;
}

/// Inviscid elliptic problem with psi = l on BC and zero mass, as one dense
/// bordered system in (psi, l).
inline qgfv::StreamSolution dense_bordered_solve(const qgfv::PrimalDualMesh& m, const qgfv::PhysicalParams& p,
                                                 const qgfv::CellField& q) {
  const auto n = static_cast<Eigen::Index>(m.num_cells());
  const Eigen::MatrixXd L = dense_laplacian(m);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.is_boundary_cell(i)) {
      A(i, i) = 1.0;
      A(i, n) = -1.0;
    } else {
      A.row(i).head(n) = p.g / p.f0 * L.row(i);
      A(i, i) -= p.f0 / p.H;
      b[i] = q[i] - p.beta * m.cell_center(i).y - p.f0 / p.H * p.bottom(i);
    }
    A(n, i) = m.cell_area(i);
  }
  const Eigen::VectorXd x = A.fullPivLu().solve(b);
  qgfv::StreamSolution s;
  s.psi = qgfv::CellField(std::vector<double>(x.data(), x.data() + n));
  s.l = x[n];
  return s;
}

}  // namespace oracles

namespace oracles {

/// Classical Stommel gyre on [0, Lx] x [0, Ly] for
///   alpha Lap(psi) + beta dpsi/dx = (A / gf) sin(pi y / Ly),   psi = 0 on the walls,
/// where A is the amplitude of the wind forcing (already divided by H) and gf = g/f0.
/// Separating psi = X(x) sin(k y) with k = pi/Ly leaves
///   alpha (X'' - k^2 X) + beta X' = G,   X(0) = X(Lx) = 0.
struct Stommel {
  double Lx, Ly, alpha, beta, G;
  double r1, r2, a, b;

  Stommel(double Lx_, double Ly_, double alpha_, double beta_, double forcing_amplitude, double gf)
      : Lx(Lx_), Ly(Ly_), alpha(alpha_), beta(beta_), G(forcing_amplitude / gf) {
    const double k = 3.14159265358979323846 / Ly;
    const double disc = std::sqrt(beta * beta + 4.0 * alpha * alpha * k * k);
    r1 = (-beta + disc) / (2.0 * alpha);  // small positive root: eastern decay scale ~ Lx
    r2 = (-beta - disc) / (2.0 * alpha);  // large negative root: western layer
    // X = Xp (1 + a e^{r1 (x - Lx)} + b e^{r2 x}), Xp = -G / (alpha k^2)
    const double e1 = std::exp(-r1 * Lx), e2 = std::exp(r2 * Lx);
    // X(0) = 0: 1 + a e1 + b = 0; X(Lx) = 0: 1 + a + b e2 = 0
    a = (e2 - 1.0) / (1.0 - e1 * e2);
    b = -1.0 - a * e1;
  }
  double X(double x) const {
    const double k = 3.14159265358979323846 / Ly;
    const double xp = -G / (alpha * k * k);
    return xp * (1.0 + a * std::exp(r1 * (x - Lx)) + b * std::exp(r2 * x));
  }
  double psi(double x, double y) const { return X(x) * std::sin(3.14159265358979323846 * y / Ly); }
};

}  // namespace oracles

namespace oracles {

/// Semi-implicit Euler step of the viscous stream-function scheme as one dense
/// bordered system in (psi, l); BC and BC1 rows pin psi to l.
inline Eigen::VectorXd dense_vsfv1_step(const qgfv::PrimalDualMesh& m, const qgfv::PhysicalParams& p, const qgfv::CellField& wind,
                                        const qgfv::CellField& psi, double dt) {
  const auto n = static_cast<Eigen::Index>(m.num_cells());
  const Eigen::MatrixXd L = dense_laplacian(m);
  const Eigen::Map<const Eigen::VectorXd> ps(psi.values.data(), n);
  const double gf = p.g / p.f0, fh = p.f0 / p.H;
  const Eigen::VectorXd lap = L * ps;

  qgfv::CellField q(m.num_cells());
  for (Eigen::Index i = 0; i < n; ++i) q[i] = gf * lap[i] + p.beta * m.cell_center(i).y - fh * (ps[i] - p.bottom(i));
  qgfv::EdgeField qh(m.num_edges());
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const auto [a, b] = m.cells(static_cast<qgfv::Index>(e));
    const bool ia = !m.is_boundary_cell(a), ib = !m.is_boundary_cell(b);
    qh[e] = ia && ib ? 0.5 * (q[a] + q[b]) : ia ? q[a] : ib ? q[b] : 0.0;
  }
  auto u = qgfv::reference::skew_gradient(m, qgfv::reference::remap_cell_to_vertex(m, psi));
  u *= gf;
  const auto adv = qgfv::reference::flux_divergence(m, u, qh);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  const Eigen::MatrixXd L2 = L * L;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.cell_class(i) == qgfv::CellClass::Interior) {
      A.row(i).head(n) = -p.mu * dt * gf * L2.row(i) + (1.0 + p.alpha * dt) * gf * L.row(i);
      A(i, i) -= fh;
      b[i] = dt * wind[i] - dt * adv[i] + gf * lap[i] - fh * ps[i];
    } else {
      A(i, i) = 1.0;
      A(i, n) = -1.0;
    }
    A(n, i) = m.cell_area(i);
  }
  return A.fullPivLu().solve(b);
}

}  // namespace oracles
