#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "ctns/error.hpp"
#include "ctns/oracle.hpp"

namespace ctns::oracle {

namespace {

using Triplet = Eigen::Triplet<double>;

// Unknown numbering: interior x faces, interior y faces, cells, one
// multiplier pinning the mean pressure.
struct Layout {
  int nx, ny;
  double hx, hy;
  int n_ux() const { return (nx - 1) * ny; }
  int n_uy() const { return nx * (ny - 1); }
  int n_u() const { return n_ux() + n_uy(); }
  int ux(int i, int j) const { return (i - 1) * ny + j; }          // 1 <= i < nx
  int uy(int i, int j) const { return n_ux() + i * (ny - 1) + (j - 1); }  // 1 <= j < ny
  int mu() const { return n_u() + nx * ny; }
  int size() const { return mu() + 1; }
};

// -Lap on face unknowns: second differences along the face normal with
// zero normal velocity at the walls, reflected ghosts across tangential walls.
void add_stiffness(const Layout& L, std::vector<Triplet>& t, double shift) {
  const double wx = 1.0 / (L.hx * L.hx), wy = 1.0 / (L.hy * L.hy);
  for (int i = 1; i < L.nx; ++i)
    for (int j = 0; j < L.ny; ++j) {
      const int r = L.ux(i, j);
      double diag = 2.0 * wx - shift;
      if (i - 1 >= 1) t.emplace_back(r, L.ux(i - 1, j), -wx);
      if (i + 1 <= L.nx - 1) t.emplace_back(r, L.ux(i + 1, j), -wx);
      if (j > 0) { t.emplace_back(r, L.ux(i, j - 1), -wy); diag += wy; } else diag += 2.0 * wy;
      if (j < L.ny - 1) { t.emplace_back(r, L.ux(i, j + 1), -wy); diag += wy; } else diag += 2.0 * wy;
      t.emplace_back(r, r, diag);
    }
  for (int i = 0; i < L.nx; ++i)
    for (int j = 1; j < L.ny; ++j) {
      const int r = L.uy(i, j);
      double diag = 2.0 * wy - shift;
      if (j - 1 >= 1) t.emplace_back(r, L.uy(i, j - 1), -wy);
      if (j + 1 <= L.ny - 1) t.emplace_back(r, L.uy(i, j + 1), -wy);
      if (i > 0) { t.emplace_back(r, L.uy(i - 1, j), -wx); diag += wx; } else diag += 2.0 * wx;
      if (i < L.nx - 1) { t.emplace_back(r, L.uy(i + 1, j), -wx); diag += wx; } else diag += 2.0 * wx;
      t.emplace_back(r, r, diag);
    }
}

// Rows of the divergence for every cell; Div(cell, face).
std::vector<Triplet> divergence_entries(const Layout& L) {
  std::vector<Triplet> d;
  for (int i = 0; i < L.nx; ++i)
    for (int j = 0; j < L.ny; ++j) {
      const int c = i * L.ny + j;
      if (i + 1 <= L.nx - 1) d.emplace_back(c, L.ux(i + 1, j), 1.0 / L.hx);
      if (i >= 1) d.emplace_back(c, L.ux(i, j), -1.0 / L.hx);
      if (j + 1 <= L.ny - 1) d.emplace_back(c, L.uy(i, j + 1), 1.0 / L.hy);
      if (j >= 1) d.emplace_back(c, L.uy(i, j), -1.0 / L.hy);
    }
  return d;
}

double max_div(const Layout& L, const Eigen::VectorXd& v) {
  Eigen::SparseMatrix<double> D(L.nx * L.ny, L.n_u());
  const auto e = divergence_entries(L);
  D.setFromTriplets(e.begin(), e.end());
  return (D * v.head(L.n_u())).cwiseAbs().maxCoeff();
}

}  // namespace

StokesMode stokes_eigenmode(const Grid& grid, double tol, double shift, int max_iters) {
  if (grid.dim != 2) throw DomainError("stokes_eigenmode handles 2D grids");
  if (grid.n[0] < 2 || grid.n[1] < 2 || grid.n[0] > 64 || grid.n[1] > 64)
    throw DomainError("stokes_eigenmode handles grids from 2x2 to 64x64");
  const Layout L{grid.n[0], grid.n[1], grid.h[0], grid.h[1]};

  std::vector<Triplet> t;
  add_stiffness(L, t, shift);
  for (const auto& e : divergence_entries(L)) {
    const int cell = L.n_u() + e.row();
    t.emplace_back(e.col(), cell, -e.value());  // -Div^T = grad
    t.emplace_back(cell, e.col(), -e.value());
  }
  for (int c = 0; c < L.nx * L.ny; ++c) {
    t.emplace_back(L.n_u() + c, L.mu(), 1.0);
    t.emplace_back(L.mu(), L.n_u() + c, 1.0);
  }
  Eigen::SparseMatrix<double> A(L.size(), L.size());
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolverError("stokes_eigenmode: factorization failed", 0, 0);

  std::vector<Triplet> kt;
  add_stiffness(L, kt, 0.0);
  Eigen::SparseMatrix<double> K(L.n_u(), L.n_u());
  K.setFromTriplets(kt.begin(), kt.end());

  // Start from a single large vortex.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(L.n_u());
  for (int i = 1; i < L.nx; ++i)
    for (int j = 0; j < L.ny; ++j) v[L.ux(i, j)] = (j + 0.5) / L.ny - 0.5;
  for (int i = 0; i < L.nx; ++i)
    for (int j = 1; j < L.ny; ++j) v[L.uy(i, j)] = 0.5 - (i + 0.5) / L.nx;
  v.normalize();

  // Converged once successive unit iterates agree (up to sign) to tol; the
  // Rayleigh quotient is then accurate to about tol^2.
  double lambda = 0.0, change = 1.0;
  int it = 0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L.size());
  for (it = 1; it <= max_iters; ++it) {
    rhs.head(L.n_u()) = v;
    const Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd next = sol.head(L.n_u()).normalized();
    if (next.dot(v) < 0.0) next = -next;
    change = (next - v).norm();
    v = next;
    if (change <= tol) break;
  }
  if (!(change <= tol))
    throw SolverError("stokes_eigenmode: inverse iteration did not settle", change, max_iters);
  lambda = v.dot(K * v);

  // Sign convention: the largest entry is positive.
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;

  StokesMode out;
  out.lambda = lambda;
  out.iterations = it;
  out.max_divergence = max_div(L, v);
  out.mode = VectorField(grid);
  auto mx = out.mode.component(0), my = out.mode.component(1);
  for (int i = 1; i < L.nx; ++i)
    for (int j = 0; j < L.ny; ++j) mx[std::size_t(i * L.ny + j)] = v[L.ux(i, j)];
  for (int i = 0; i < L.nx; ++i)
    for (int j = 1; j < L.ny; ++j) my[std::size_t(i * (L.ny + 1) + j)] = v[L.uy(i, j)];
  return out;
}

}  // namespace ctns::oracle
