#pragma once

// Incompressible Navier-Stokes on the MAC grid:
//
//   u_t + (Y_eps u . grad) u = Lap u - grad P + n grad Phi,   div u = 0,
//
// with the Yosida smoothing Y_eps = (I + eps A)^{-1} of the advecting
// velocity, A the discrete Stokes operator -P Lap on solenoidal fields.

#include <span>

#include "ctns/coefficients.hpp"
#include "ctns/fields.hpp"

namespace ctns {

struct FluidStepParams {
  double dt = 2.5e-4;
  double epsilon_yosida = 0.0;
  double poisson_tol = 1e-10;
  int max_iters = 500;
  /// dt ||u||_inf / h must not exceed this.
  double cfl_max = 0.5;
};

struct Projection {
  VectorField u;    ///< solenoidal part
  ScalarField phi;  ///< u_star = u + grad phi
  SolveStats stats;
};

/// Helmholtz projection u = u_star - grad phi with Lap_h phi = div u_star
/// (Neumann). Normal components on the boundary must be zero.
Projection helmholtz_project(const VectorField& u_star, double tol = 1e-10,
                             int max_iters = 500);

/// v solving (I + a A_h) v = P w on the solenoidal subspace, by conjugate
/// gradients with the projected vector-Helmholtz inverse as preconditioner.
/// The stopping test is relative to |w|. a == 0 returns P w.
VectorField stokes_resolvent(const VectorField& w, double a, double tol = 1e-10,
                             int max_iters = 500, SolveStats* stats = nullptr);

/// Y_eps u = (I + eps A_h)^{-1} u. eps == 0 is the identity (no projection).
VectorField yosida_apply(double eps, const VectorField& u, double tol = 1e-10,
                         int max_iters = 500, SolveStats* stats = nullptr);

/// Skew-symmetric MAC convection (a . grad) w: the average of divergence and
/// advective forms, so <C(a) w, w> = 0 for every a and no-slip w.
VectorField convection(const VectorField& a, const VectorField& w);

/// n grad Phi on interior faces, n by arithmetic face mean.
VectorField buoyancy(const ScalarField& n, const VectorField& grad_phi);

struct NsStepResult {
  VectorField u;
  ScalarField pressure;
  /// int n u_next . grad Phi with the n used in the step.
  double forcing_work = 0.0;
  int projection_iterations = 0;
  double max_divergence = 0.0;
};

/// One step: a = Y_eps(u); u* = u + dt(-C(a) u + n grad Phi);
/// v = (I - dt Lap_h)^{-1} P u* componentwise; u_next = P v. The pressure is
/// the sum of both projection potentials over dt. Throws CflError / SolverError.
NsStepResult ns_step(const VectorField& u, const ScalarField& n, const VectorField& grad_phi,
                     const FluidStepParams& params);

/// dt ||u||_inf / min h.
double fluid_courant(const VectorField& u, double dt);

/// kinetic(u_next) - kinetic(u_prev) + dt int |grad u_next|^2 - dt int n u_next . grad Phi.
double ns_energy_residual(const VectorField& u_prev, const VectorField& u_next,
                          const ScalarField& n, const VectorField& grad_phi, double dt);

/// Discrete stream-function velocity u = (d psi/dy, -d psi/dx[, 0]) with psi
/// given at the (nx+1) x (ny+1) nodes of the x-y plane, row-major in x.
/// Exactly divergence-free; no-slip when psi vanishes on the boundary. In 3D
/// every z-slab k is scaled by slab_weight[k] (default 1).
VectorField curl_of_nodal_stream(const Grid& g, std::span<const double> psi_nodes,
                                 std::span<const double> slab_weight = {});

}  // namespace ctns
