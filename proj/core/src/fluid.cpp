#include "ctns/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ctns/error.hpp"
#include "ctns/functionals.hpp"
#include "ctns/pcg.hpp"
#include "ctns/spectral.hpp"
#include "ctns/stencil.hpp"

namespace ctns {

namespace {

// Unweighted inner product over all components.
double vdot(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int d = 0; d < a.grid().dim; ++d) s += dot(a.component(d), b.component(d));
  return s;
}

void axpy(double alpha, const VectorField& x, VectorField& y) {
  for (int d = 0; d < x.grid().dim; ++d) {
    const auto xs = x.component(d);
    auto ys = y.component(d);
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += alpha * xs[i];
  }
}

// phi with Lap_h phi = rhs (Neumann), rhs taken mean-free.
ScalarField poisson_neumann(ScalarField rhs, double tol, int max_iters, SolveStats* stats) {
  const Grid& g = rhs.grid();
  const double mean = pairwise_sum(rhs.values()) / double(rhs.size());
  for (double& v : rhs.values()) v -= mean;
  ScalarField phi(g);
  const SpectralSolver& spectral = cell_spectral_solver(g, ScalarBc::Neumann);
  spectral.solve(rhs.values(), phi.values(), 0.0, -1.0);

  // Refine on -Lap phi = -rhs; the spectral solve is exact up to rounding so
  // this normally returns immediately.
  for (double& v : rhs.values()) v = -v;
  std::vector<double> lap(rhs.size());
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    apply_laplacian(g, ScalarBc::Neumann, in, out);
    for (double& v : out) v = -v;
  };
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    spectral.solve(in, out, 0.0, 1.0);
  };
  const SolveStats st = pcg(apply, precondition, rhs.values(), phi.values(), tol, max_iters);
  if (stats) *stats = st;
  if (!(st.rel_residual <= tol))
    throw SolverError("pressure Poisson solve did not converge", st.rel_residual,
                      st.iterations);
  return phi;
}

void subtract_gradient(VectorField& u, const ScalarField& phi) {
  const VectorField gphi = gradient(phi);
  axpy(-1.0, gphi, u);
}

// (I - a Lap_h)^{-1} per component, interior faces only.
VectorField helmholtz_inverse(const VectorField& w, double a) {
  const Grid& g = w.grid();
  VectorField out(g);
  std::vector<double> in_buf, out_buf;
  for (int d = 0; d < g.dim; ++d) {
    const SpectralSolver& s = face_spectral_solver(g, d);
    in_buf.resize(s.size());
    out_buf.resize(s.size());
    const auto e = g.face_extent(d);
    const auto src = w.component(d);
    auto dst = out.component(d);
    std::size_t m = 0;
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j)
        for (int k = 0; k < e[2]; ++k) {
          const std::array<int, 3> idx{i, j, k};
          if (idx[d] == 0 || idx[d] == g.n[d]) continue;
          in_buf[m++] = src[g.face(d, i, j, k)];
        }
    s.solve(in_buf, out_buf, 1.0, a);
    m = 0;
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j)
        for (int k = 0; k < e[2]; ++k) {
          const std::array<int, 3> idx{i, j, k};
          if (idx[d] == 0 || idx[d] == g.n[d]) continue;
          dst[g.face(d, i, j, k)] = out_buf[m++];
        }
  }
  return out;
}

VectorField project_only(const VectorField& w, double tol, int max_iters) {
  VectorField u = w;
  const ScalarField phi = poisson_neumann(divergence(w), tol, max_iters, nullptr);
  subtract_gradient(u, phi);
  return u;
}

}  // namespace

Projection helmholtz_project(const VectorField& u_star, double tol, int max_iters) {
  Projection p;
  p.u = u_star;
  p.phi = poisson_neumann(divergence(u_star), tol, max_iters, &p.stats);
  subtract_gradient(p.u, p.phi);
  p.u.solenoidal = true;
  return p;
}

VectorField stokes_resolvent(const VectorField& w, double a, double tol, int max_iters,
                             SolveStats* stats) {
  if (!(a >= 0.0)) throw DomainError("stokes_resolvent requires a >= 0");
  const Grid& g = w.grid();
  VectorField b = project_only(w, tol * 1e-2, max_iters);
  if (stats) *stats = {};
  if (a == 0.0) {
    b.solenoidal = true;
    return b;
  }
  // Residuals are measured against |w|: when w is nearly a gradient, |P w| sits
  // at the level of the projection error and cannot serve as a reference.
  const double bnorm = std::sqrt(vdot(w, w));
  VectorField x(g);
  if (bnorm == 0.0) {
    x.solenoidal = true;
    return x;
  }
  auto apply = [&](const VectorField& v) {
    VectorField out = vector_laplacian(v);
    for (int d = 0; d < g.dim; ++d) {
      auto o = out.component(d);
      const auto vs = v.component(d);
      for (std::size_t i = 0; i < o.size(); ++i) o[i] = vs[i] - a * o[i];
    }
    return project_only(out, tol * 1e-2, max_iters);
  };
  auto precondition = [&](const VectorField& r) {
    return project_only(helmholtz_inverse(r, a), tol * 1e-2, max_iters);
  };

  x = precondition(b);
  VectorField r = b;
  axpy(-1.0, apply(x), r);
  double rnorm = std::sqrt(vdot(r, r));
  int it = 0;
  if (rnorm > tol * bnorm) {
    VectorField z = precondition(r);
    VectorField p = z;
    double rz = vdot(r, z);
    for (it = 1; it <= max_iters; ++it) {
      const VectorField q = apply(p);
      const double pq = vdot(p, q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      axpy(alpha, p, x);
      axpy(-alpha, q, r);
      rnorm = std::sqrt(vdot(r, r));
      if (rnorm <= tol * bnorm) break;
      z = precondition(r);
      const double rz_new = vdot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (int d = 0; d < g.dim; ++d) {
        auto ps = p.component(d);
        const auto zs = z.component(d);
        for (std::size_t i = 0; i < ps.size(); ++i) ps[i] = zs[i] + beta * ps[i];
      }
    }
  }
  if (stats) *stats = {it, rnorm / bnorm};
  if (!(rnorm <= tol * bnorm))
    throw SolverError("Stokes resolvent did not converge", rnorm / bnorm, it);
  x.solenoidal = true;
  return x;
}

VectorField yosida_apply(double eps, const VectorField& u, double tol, int max_iters,
                         SolveStats* stats) {
  if (!(eps >= 0.0)) throw DomainError("Yosida parameter must be >= 0");
  if (eps == 0.0) {
    if (stats) *stats = {};
    return u;
  }
  return stokes_resolvent(u, eps, tol, max_iters, stats);
}

VectorField convection(const VectorField& a, const VectorField& w) {
  const Grid& g = w.grid();
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const auto e = g.face_extent(d);
    const double* wd = w.component(d).data();
    double* od = out.component(d).data();
    for (int ax = 0; ax < g.dim; ++ax) {
      const double* ae = a.component(ax).data();
      const auto ea = g.face_extent(ax);
      const std::size_t ws = axis_stride(e, ax);  // neighbour of w along ax
      const std::size_t sd = axis_stride(e, d);
      const std::size_t ta = axis_stride(ea, ax), td = axis_stride(ea, d);
      const double scale = 1.0 / (2.0 * g.h[ax]);
      for (int i = 0; i < e[0]; ++i)
        for (int j = 0; j < e[1]; ++j)
          for (int k = 0; k < e[2]; ++k) {
            const std::array<int, 3> idx{i, j, k};
            if (idx[d] == 0 || idx[d] == g.n[d]) continue;
            const std::size_t f = g.face(d, i, j, k);
            // Transport velocity through the +/- sides of the control volume.
            double up, um;
            if (ax == d) {
              up = 0.5 * (ae[f] + ae[f + sd]);
              um = 0.5 * (ae[f - sd] + ae[f]);
            } else {
              // a_ax at the ax-faces bordering the edge, on the cells
              // idx[d]-1 and idx[d].
              const std::size_t b = g.face(ax, i, j, k);
              up = 0.5 * (ae[b + ta - td] + ae[b + ta]);
              um = 0.5 * (ae[b - td] + ae[b]);
            }
            // Tangential walls: up/um vanish there, the ghost value is irrelevant.
            const double wp = idx[ax] < e[ax] - 1 ? wd[f + ws] : 0.0;
            const double wm = idx[ax] > 0 ? wd[f - ws] : 0.0;
            od[f] += (up * wp - um * wm) * scale;
          }
    }
  }
  return out;
}

VectorField buoyancy(const ScalarField& n, const VectorField& grad_phi) {
  const Grid& g = n.grid();
  VectorField out(g);
  for (int d = 0; d < g.dim; ++d) {
    const double* gp = grad_phi.component(d).data();
    double* od = out.component(d).data();
    for_each_interior_face(g, d, [&](std::size_t f, std::size_t l, std::size_t r) {
      od[f] = 0.5 * (n[l] + n[r]) * gp[f];
    });
  }
  return out;
}

double fluid_courant(const VectorField& u, double dt) {
  return dt * linf_norm(u) / u.grid().min_spacing();
}

NsStepResult ns_step(const VectorField& u, const ScalarField& n, const VectorField& grad_phi,
                     const FluidStepParams& params) {
  if (!(params.dt > 0.0)) throw DomainError("ns_step requires dt > 0");
  const double courant = fluid_courant(u, params.dt);
  if (courant > params.cfl_max)
    throw CflError("velocity step exceeds the CFL limit", courant);
  const Grid& g = u.grid();
  const double dt = params.dt;

  const VectorField a =
      yosida_apply(params.epsilon_yosida, u, params.poisson_tol, params.max_iters);
  VectorField u_star = u;
  {
    const VectorField conv = convection(a, u);
    const VectorField force = buoyancy(n, grad_phi);
    for (int d = 0; d < g.dim; ++d) {
      auto us = u_star.component(d);
      const auto cs = conv.component(d);
      const auto fs = force.component(d);
      for (std::size_t i = 0; i < us.size(); ++i) us[i] += dt * (fs[i] - cs[i]);
    }
  }
  u_star.solenoidal = false;

  // Project, implicit viscous solve per component, project again. The first
  // projection removes gradient forcing exactly; without it the Helmholtz
  // inverse turns a gradient into a non-gradient near tangential walls and
  // constant-density buoyancy drives a steady O(dt g) flow.
  NsStepResult res;
  Projection pre = helmholtz_project(u_star, params.poisson_tol, params.max_iters);
  Projection post = helmholtz_project(helmholtz_inverse(pre.u, dt), params.poisson_tol,
                                      params.max_iters);
  res.u = std::move(post.u);
  res.pressure = std::move(pre.phi);
  {
    auto ps = res.pressure.values();
    const auto qs = post.phi.values();
    for (std::size_t i = 0; i < ps.size(); ++i) ps[i] = (ps[i] + qs[i]) / dt;
  }
  res.projection_iterations = std::max(pre.stats.iterations, post.stats.iterations);

  res.forcing_work = forcing_work(n, res.u, grad_phi);
  res.max_divergence = max_abs_divergence(res.u);
  return res;
}

double ns_energy_residual(const VectorField& u_prev, const VectorField& u_next,
                          const ScalarField& n, const VectorField& grad_phi, double dt) {
  return kinetic_energy(u_next) - kinetic_energy(u_prev) + dt * vector_grad_sq(u_next) -
         dt * forcing_work(n, u_next, grad_phi);
}

VectorField curl_of_nodal_stream(const Grid& g, std::span<const double> psi_nodes,
                                 std::span<const double> slab_weight) {
  const int nx = g.n[0], ny = g.n[1];
  if (psi_nodes.size() != std::size_t(nx + 1) * (ny + 1))
    throw DomainError("stream function needs (nx+1)*(ny+1) nodal values");
  if (!slab_weight.empty() && slab_weight.size() != std::size_t(g.n[2]))
    throw DomainError("slab weights need one value per z-cell");
  auto psi = [&](int i, int j) { return psi_nodes[std::size_t(i) * (ny + 1) + j]; };
  VectorField u(g);
  for (int k = 0; k < g.n[2]; ++k) {
    const double w = slab_weight.empty() ? 1.0 : slab_weight[k];
    for (int i = 0; i <= nx; ++i)
      for (int j = 0; j < ny; ++j) u.at(0, i, j, k) = w * (psi(i, j + 1) - psi(i, j)) / g.h[1];
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j <= ny; ++j) u.at(1, i, j, k) = -w * (psi(i + 1, j) - psi(i, j)) / g.h[0];
  }
  return u;
}

}  // namespace ctns
