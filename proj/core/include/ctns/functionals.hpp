#pragma once

// Scalar functionals tracked along a trajectory: mass, norms of the signal,
// the energy
//
//   F[n,c,u] = int n ln n + 1/2 int chi(c)/f(c) |grad c|^2 + kappa int |u|^2,
//
// its dissipation rate, the Navier-Stokes energy terms, entropy values and a
// lower bound for int F(phi) in terms of mass and int phi^3.

#include <limits>
#include <optional>

#include "ctns/coefficients.hpp"
#include "ctns/entropy.hpp"
#include "ctns/fields.hpp"

namespace ctns {

struct FunctionalSnapshot {
  double t = 0.0;
  double mass = 0.0;
  double linf_c = 0.0;
  double l1_c = 0.0;
  double l2_c = 0.0;
  double energy_F = 0.0;
  double dissipation = 0.0;
  double ns_kinetic = 0.0;
  double grad_u_sq = 0.0;
  double forcing_work = 0.0;
  double entropy_p2 = std::numeric_limits<double>::quiet_NaN();
  double entropy_p3 = std::numeric_limits<double>::quiet_NaN();
  double linf_n_dev = 0.0;
  double linf_u = 0.0;
};

/// int n ln n (0 ln 0 = 0) + 1/2 sum_faces chi(c_f)/f(max(c_f, sigma_c)) |grad c|^2
/// + kappa int |u|^2, with c_f the arithmetic face mean. Throws DomainError
/// for negative n or c.
double energy_F(const ScalarField& n, const ScalarField& c, const VectorField& u,
                const Sensitivity& chi, const Consumption& f, double kappa, double sigma_c);

/// Split of energy_F into its three parts, for diagnostics.
struct EnergyParts {
  double entropy = 0.0;
  double signal = 0.0;
  double kinetic = 0.0;
  double total() const { return entropy + signal + kinetic; }
};
EnergyParts energy_parts(const ScalarField& n, const ScalarField& c, const VectorField& u,
                         const Sensitivity& chi, const Consumption& f, double kappa,
                         double sigma_c);

/// int |grad n|^2/max(n,sigma_n) + |grad c|^4/max(c,sigma_c)^3 + |grad u|^2.
/// The first term lives on faces (face mean of n), the second at cell
/// centres (averaged face gradients).
double dissipation_D(const ScalarField& n, const ScalarField& c, const VectorField& u,
                     double sigma_n, double sigma_c);

struct NsEnergyTerms {
  double kinetic = 0.0;
  double grad_u_sq = 0.0;
  double forcing_work = 0.0;
};
/// 1/2 int |u|^2, int |grad u|^2 and int n u . grad Phi (n at faces by
/// arithmetic mean).
NsEnergyTerms ns_energy_terms(const ScalarField& n, const VectorField& u, const Potential& phi);
double forcing_work(const ScalarField& n, const VectorField& u, const VectorField& grad_phi);

/// int psi_delta(n) rho(c). Throws DomainError naming the first cell with
/// c >= 2 eta.
double entropy_value(const EntropyPair& pair, const ScalarField& n, const ScalarField& c);

/// int n^(p-2) |grad n|^2 with n^(p-2) taken at the face mean.
double weighted_grad_sq(const ScalarField& n, double p);

struct Lemma433Report {
  double m = 0.0;
  double B = 0.0;
  double bound = 0.0;
  double lhs = 0.0;
  bool pass = true;
};
/// m = int phi, B = max(int phi^3, m/8); passes iff
/// int F(phi) >= sqrt(m^3 / (128 B)) - 1e-12.
Lemma433Report lemma433_check(const ScalarField& phi, const RegularizedF& F);

/// Running space-time integrals for the interpolation ratio
///   int_J int |u|^(10/3) / (||grad u||^2_{L2(Q_J)} ||u||^(4/3)_{L inf(J; L2)}).
class GnAccumulator {
 public:
  /// Adds one sample of width dt.
  void add(const VectorField& u, double dt);
  int samples() const { return samples_; }
  /// nullopt while fewer than two samples are present or a denominator is 0.
  std::optional<double> ratio() const;
  void reset() { *this = GnAccumulator{}; }

 private:
  double u_pow_ = 0.0;
  double grad_sq_ = 0.0;
  double sup_l2_ = 0.0;
  int samples_ = 0;
};

/// int |u|^(10/3) with the velocity averaged to cell centres.
double velocity_power_integral(const VectorField& u, double power);

}  // namespace ctns
