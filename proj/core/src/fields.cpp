#include "ctns/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctns/error.hpp"
#include "ctns/pcg.hpp"
#include "ctns/spectral.hpp"
#include "ctns/stencil.hpp"

namespace ctns {

namespace {

void require_cells(int count) {
  if (count < 1) throw DomainError("grid needs at least one cell per axis");
}

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

// ---- Grid ------------------------------------------------------------------

Grid Grid::make(int nx, int ny, double lx, double ly) {
  require_cells(nx);
  require_cells(ny);
  if (!(lx > 0.0) || !(ly > 0.0)) throw DomainError("grid extents must be positive");
  Grid g;
  g.dim = 2;
  g.n = {nx, ny, 1};
  g.length = {lx, ly, 1.0};
  g.h = {lx / nx, ly / ny, 1.0};
  return g;
}

Grid Grid::make(int nx, int ny, int nz, double lx, double ly, double lz) {
  require_cells(nx);
  require_cells(ny);
  require_cells(nz);
  if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0))
    throw DomainError("grid extents must be positive");
  Grid g;
  g.dim = 3;
  g.n = {nx, ny, nz};
  g.length = {lx, ly, lz};
  g.h = {lx / nx, ly / ny, lz / nz};
  return g;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim; ++d) v *= h[d];
  return v;
}

double Grid::volume() const {
  double v = 1.0;
  for (int d = 0; d < dim; ++d) v *= length[d];
  return v;
}

double Grid::min_spacing() const {
  double m = h[0];
  for (int d = 1; d < dim; ++d) m = std::min(m, h[d]);
  return m;
}

std::array<double, 3> Grid::cell_center(int i, int j, int k) const {
  return {(i + 0.5) * h[0], (j + 0.5) * h[1], dim == 3 ? (k + 0.5) * h[2] : 0.0};
}

std::array<double, 3> Grid::face_center(int d, int i, int j, int k) const {
  auto x = cell_center(i, j, k);
  const std::array<int, 3> idx{i, j, k};
  x[d] = idx[d] * h[d];
  return x;
}

// ---- fields ----------------------------------------------------------------

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), values_(grid.cell_count(), value) {}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

VectorField::VectorField(const Grid& grid) : grid_(grid) {
  for (int d = 0; d < grid.dim; ++d) comp_[d].assign(grid.face_count(d), 0.0);
}

bool VectorField::all_finite() const {
  for (const auto& c : comp_)
    if (!std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); }))
      return false;
  return true;
}

// ---- reductions ------------------------------------------------------------

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  // Blocked products so the reduction tree is the same as pairwise_sum.
  constexpr std::size_t kBlock = 1024;
  std::array<double, kBlock> buf;
  std::vector<double> partial;
  partial.reserve(a.size() / kBlock + 1);
  for (std::size_t start = 0; start < a.size(); start += kBlock) {
    const std::size_t len = std::min(kBlock, a.size() - start);
    for (std::size_t i = 0; i < len; ++i) buf[i] = a[start + i] * b[start + i];
    partial.push_back(pairwise_sum_impl(buf.data(), len));
  }
  return pairwise_sum(partial);
}

double integrate(const ScalarField& f) {
  return pairwise_sum(f.values()) * f.grid().cell_volume();
}

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  std::vector<double> t(f.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::pow(std::abs(f[i]), p);
  return std::pow(pairwise_sum(t) * f.grid().cell_volume(), 1.0 / p);
}

double linf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double linf_norm(const VectorField& u) {
  double m = 0.0;
  for (int d = 0; d < u.grid().dim; ++d)
    for (double v : u.component(d)) m = std::max(m, std::abs(v));
  return m;
}

double inner(const ScalarField& a, const ScalarField& b) {
  return dot(a.values(), b.values()) * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int d = 0; d < a.grid().dim; ++d) s += dot(a.component(d), b.component(d));
  return s * a.grid().cell_volume();
}

double kinetic_energy(const VectorField& u) { return 0.5 * inner(u, u); }

// ---- operators -------------------------------------------------------------

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const double* in = f.values().data();
  for (int d = 0; d < g.dim; ++d) {
    double* comp = out.component(d).data();
    const double inv_h = 1.0 / g.h[d];
    for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
      comp[face] = (in[r] - in[l]) * inv_h;
    });
  }
  return out;
}

ScalarField divergence(const VectorField& u) {
  const Grid& g = u.grid();
  ScalarField out(g);
  double* o = out.values().data();
  for (int d = 0; d < g.dim; ++d) {
    const double* comp = u.component(d).data();
    const double inv_h = 1.0 / g.h[d];
    for_each_cell_faces(g, d, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      o[c] += (comp[hi] - comp[lo]) * inv_h;
    });
  }
  return out;
}

double max_abs_divergence(const VectorField& u) { return linf_norm(divergence(u)); }

void apply_laplacian(const Grid& g, ScalarBc bc, std::span<const double> in,
                     std::span<double> out) {
  const double* x = in.data();
  double* y = out.data();
  std::fill(out.begin(), out.end(), 0.0);
  for (int d = 0; d < g.dim; ++d) {
    const double w = 1.0 / (g.h[d] * g.h[d]);
    for_each_link(g.n, d, [&](std::size_t lo, std::size_t hi) {
      const double flux = w * (x[hi] - x[lo]);
      y[lo] += flux;
      y[hi] -= flux;
    });
    // Reflected ghost: the wall link contributes -2 w f.
    if (bc == ScalarBc::Dirichlet)
      for_each_wall(g.n, d, [&](std::size_t c) { y[c] -= 2.0 * w * x[c]; });
  }
}

ScalarField laplacian(const ScalarField& f, ScalarBc bc) {
  ScalarField out(f.grid());
  apply_laplacian(f.grid(), bc, f.values(), out.values());
  return out;
}

void apply_vector_laplacian(const Grid& g, int d, std::span<const double> in,
                            std::span<double> out) {
  const auto e = g.face_extent(d);
  const double* x = in.data();
  double* y = out.data();
  std::fill(out.begin(), out.end(), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    const double w = 1.0 / (g.h[a] * g.h[a]);
    // Along the normal axis the end values are the stored boundary zeros.
    for_each_link(e, a, [&](std::size_t lo, std::size_t hi) {
      const double flux = w * (x[hi] - x[lo]);
      y[lo] += flux;
      y[hi] -= flux;
    });
    if (a != d) for_each_wall(e, a, [&](std::size_t f) { y[f] -= 2.0 * w * x[f]; });
  }
  for_each_wall(e, d, [&](std::size_t f) { y[f] = 0.0; });
}

VectorField vector_laplacian(const VectorField& u) {
  const Grid& g = u.grid();
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) apply_vector_laplacian(g, d, u.component(d), out.component(d));
  return out;
}

double grad_sq(const ScalarField& f, ScalarBc bc) {
  const Grid& g = f.grid();
  const double* x = f.values().data();
  std::vector<double> terms(f.size(), 0.0);
  for (int d = 0; d < g.dim; ++d) {
    const double w = 1.0 / (g.h[d] * g.h[d]);
    for_each_link(g.n, d, [&](std::size_t lo, std::size_t hi) {
      const double diff = x[hi] - x[lo];
      terms[lo] += w * diff * diff;
    });
    if (bc == ScalarBc::Dirichlet)
      for_each_wall(g.n, d, [&](std::size_t c) { terms[c] += 2.0 * w * x[c] * x[c]; });
  }
  return pairwise_sum(terms) * g.cell_volume();
}

double vector_grad_sq(const VectorField& u) {
  const Grid& g = u.grid();
  double total = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const auto e = g.face_extent(d);
    const double* x = u.component(d).data();
    std::vector<double> terms(g.face_count(d), 0.0);
    // Boundary-normal faces hold zero, so links and walls touching them add
    // nothing beyond the normal-direction differences against the wall.
    for (int a = 0; a < g.dim; ++a) {
      const double w = 1.0 / (g.h[a] * g.h[a]);
      for_each_link(e, a, [&](std::size_t lo, std::size_t hi) {
        const double diff = x[hi] - x[lo];
        terms[lo] += w * diff * diff;
      });
      if (a != d) for_each_wall(e, a, [&](std::size_t f) { terms[f] += 2.0 * w * x[f] * x[f]; });
    }
    total += pairwise_sum(terms);
  }
  return total * g.cell_volume();
}

// ---- implicit diffusion ------------------------------------------------------

ScalarField laplacian_solve(const ScalarField& rhs, double a, ScalarBc bc,
                            const SolveOptions& opts, SolveStats* stats) {
  if (!(a >= 0.0)) throw DomainError("laplacian_solve requires a >= 0");
  const Grid& g = rhs.grid();
  ScalarField x = rhs;
  if (a == 0.0) {
    if (stats) *stats = {};
    return x;
  }
  const SpectralSolver& spectral = cell_spectral_solver(g, bc);
  std::vector<double> lap(rhs.size());
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    apply_laplacian(g, bc, in, lap);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] - a * lap[i];
  };
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    spectral.solve(in, out, 1.0, a);
  };
  spectral.solve(rhs.values(), x.values(), 1.0, a);
  const SolveStats st = pcg(apply, precondition, rhs.values(), x.values(), opts.rel_tol,
                            opts.max_iters);
  if (stats) *stats = st;
  if (!(st.rel_residual <= opts.rel_tol))
    throw SolverError("laplacian_solve did not converge", st.rel_residual, st.iterations);
  if (bc == ScalarBc::Neumann) {
    // The Neumann operator maps constants to constants; shift the solution so
    // the discrete mean matches the right-hand side to rounding.
    const double shift = (pairwise_sum(rhs.values()) - pairwise_sum(x.values())) /
                         static_cast<double>(x.size());
    for (double& v : x.values()) v += shift;
  }
  return x;
}

}  // namespace ctns
