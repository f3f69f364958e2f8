#pragma once

// Independent reference implementations: composite Simpson quadrature,
// manufactured-solution refinement studies, a dense re-implementation of the
// transport steps on tiny grids and a sparse saddle-point eigen solver for
// the discrete Stokes operator. Nothing here calls into the stencil kernels
// it is meant to check.

#include <functional>
#include <string>
#include <vector>

#include "ctns/chemotaxis.hpp"
#include "ctns/coefficients.hpp"
#include "ctns/entropy.hpp"
#include "ctns/fields.hpp"

namespace ctns::oracle {

// ---- quadrature ---------------------------------------------------------------

/// Composite Simpson rule on [a, b]. Throws DomainError for panels < 10^4 and
/// for a non-finite integrand sample.
double quadrature_reference(const std::function<double(double)>& integrand, double a, double b,
                            long panels);

/// psi_delta(s) by composite Simpson in the variable t = sigma/s.
double psi_reference(const EntropyPair& pair, double s, long panels = 1'000'000);

// ---- manufactured solutions ---------------------------------------------------

enum class MmsOperator { HeatNeumann, AdvDiff, StokesDiffusion };

std::string to_string(MmsOperator op);

struct MmsResult {
  MmsOperator op = MmsOperator::HeatNeumann;
  /// Cells per axis of each spatial level.
  std::vector<int> resolutions;
  std::vector<double> spatial_errors;
  /// log2(e_k / e_{k+1}).
  std::vector<double> spatial_orders;
  std::vector<double> time_steps;
  std::vector<double> temporal_errors;
  std::vector<double> temporal_orders;
  /// Threshold the observed orders are held to (0 where not measured).
  double spatial_required = 0.0;
  double temporal_required = 0.0;
  bool pass = true;
};

/// Refinement study with k >= 3 levels.
///   HeatNeumann     cos(pi x) cos(pi y) e^(-2 pi^2 t): spatial and temporal
///   AdvDiff         Gaussian carried by a uniform stream: spatial (upwind)
///   StokesDiffusion decaying Stokes eigenmode: temporal
/// Throws DomainError for k < 3; solver errors propagate.
MmsResult mms_convergence(MmsOperator op, int k);

// ---- tiny grid transport -------------------------------------------------------

struct TinyStep {
  std::vector<double> values;
  /// Net flux through every interior face, per component, in storage order
  /// of the face arrays (boundary entries are zero).
  std::vector<std::vector<double>> face_flux;
};

/// Dense index-by-index n update: fluxes, explicit transport, then
/// (I - dt Lap) solved by LU. Grid at most 5x5 in 2D.
TinyStep tiny_n_step(const ScalarField& n, const ScalarField& c, const VectorField& u,
                     const Sensitivity& chi, double epsilon, double dt, Limiter limiter);

/// Dense c update: advection, diffusion by LU, then consumption by bisection
/// (or the closed form when f is linear).
TinyStep tiny_c_step(const ScalarField& c, const ScalarField& n, const VectorField& u,
                     const Consumption& f, double epsilon, double dt, Limiter limiter,
                     ConsumptionMode mode = ConsumptionMode::ImplicitPointwise);

// ---- Stokes operator -----------------------------------------------------------

struct StokesMode {
  double lambda = 0.0;
  VectorField mode;  ///< unit Euclidean norm over the face unknowns
  int iterations = 0;
  double max_divergence = 0.0;
};

/// Smallest eigenpair of the discrete Stokes operator -P Lap on a 2D grid by
/// inverse power iteration on the assembled saddle-point system. `shift`
/// selects the eigenvalue closest to it instead. Throws SolverError if the
/// Rayleigh quotient does not settle to `tol`.
StokesMode stokes_eigenmode(const Grid& grid, double tol = 1e-12, double shift = 0.0,
                            int max_iters = 2000);

// ---- named suites ---------------------------------------------------------------

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string name;
  std::vector<Check> checks;
  bool pass() const;
};

std::vector<std::string> suite_names();
bool has_suite(const std::string& name);
/// Throws DomainError for an unknown name.
SuiteResult run_suite(const std::string& name);

}  // namespace ctns::oracle
