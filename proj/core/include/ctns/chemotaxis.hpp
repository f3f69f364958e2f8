#pragma once

// Transport of the cell density and the signal:
//
//   n_t + u . grad n = Lap n - div(n F'(n) chi(c) grad c)
//   c_t + u . grad c = Lap c - F(n) f(c)
//
// Explicit upwind fluxes, then implicit diffusion, then (for c) implicit
// pointwise consumption. Both updates are conservative and positivity
// preserving under the cell-outflow Courant limit.

#include <vector>

#include "ctns/coefficients.hpp"
#include "ctns/fields.hpp"

namespace ctns {

enum class Limiter { Upwind, MinMod };
enum class ConsumptionMode { ImplicitPointwise, ExplicitClipped };

struct TransportStepParams {
  double dt = 2.5e-4;
  Limiter limiter = Limiter::Upwind;
  ConsumptionMode consumption = ConsumptionMode::ImplicitPointwise;
  /// Largest admissible cell-outflow Courant number.
  double cfl_max = 0.5;
  SolveOptions solve{};
};

/// Per-cell outflow Courant number dt * sum over faces of (outgoing speed)/h,
/// maximised over cells. `drift` may be empty.
double outflow_courant(const VectorField& u, const VectorField* drift, double dt);

/// chi(c_f) grad c on interior faces (c_f arithmetic face mean).
VectorField chemotactic_velocity(const ScalarField& c, const Sensitivity& chi);

/// Throws DomainError on negative n, CflError if the combined drift breaks
/// the Courant limit.
ScalarField n_step(const ScalarField& n, const ScalarField& c, const VectorField& u,
                   const Sensitivity& chi, const RegularizedF& F,
                   const TransportStepParams& params);

struct CStepResult {
  ScalarField c;
  /// Signal after advection and diffusion, before consumption.
  ScalarField c_mid;
  /// Realised consumption rate per cell, (c_mid - c) / dt.
  ScalarField consumption;
  /// int |grad c_mid|^2.
  double grad_sq_mid = 0.0;
};

/// `n` is the density the signal is consumed by (the already advanced one in
/// the simulation loop).
CStepResult c_step(const ScalarField& c, const ScalarField& n, const VectorField& u,
                   const Consumption& f, const RegularizedF& F,
                   const TransportStepParams& params);

/// Time-integrated form of
///   int c^p(t) + p(p-1) int int c^(p-2) |grad c|^2 + p int int F(n) f(c) c^(p-1)
///     <= int c^p(t0),   p in {1, 2}.
/// `scheme` accumulates the integrals with the quantities each sub-step
/// actually dissipates; `trapezoid` evaluates the integrands on successive
/// states and integrates by the trapezoid rule.
class Lemma31Tracker {
 public:
  Lemma31Tracker() = default;
  /// Starts the window at state (c, n).
  Lemma31Tracker(const ScalarField& c, const ScalarField& n, const Consumption& f,
                 const RegularizedF& F);

  /// Adds one step ending in `step.c` with consumer density `n_new`.
  void add_step(const CStepResult& step, const ScalarField& n_new, double dt);

  /// LHS - RHS at the current state.
  double scheme_residual(int p) const;
  double trapezoid_residual(int p) const;
  /// int c^p at the start of the window.
  double baseline(int p) const { return base_[p - 1]; }
  /// Accumulated int int F(n) f(c) (scheme quadrature).
  double consumed() const { return cons_[0]; }
  /// Accumulated int int |grad c|^2 (scheme quadrature).
  double grad_sq_integral() const { return diss_[1] / 2.0; }

 private:
  struct Integrand {
    double grad_sq = 0.0;      // int |grad c|^2
    double cons[2] = {0, 0};   // int F(n) f(c) c^(p-1)
  };
  static Integrand integrand(const ScalarField& c, const ScalarField& n, const Consumption& f,
                             const RegularizedF& F);

  Consumption f_ = Consumption::linear();
  RegularizedF F_{};
  double base_[2] = {0, 0};
  double current_[2] = {0, 0};
  double diss_[2] = {0, 0};
  double cons_[2] = {0, 0};
  double trap_[2] = {0, 0};
  Integrand last_{};
};

/// int c^p.
double power_integral(const ScalarField& c, double p);

}  // namespace ctns
