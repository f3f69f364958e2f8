#pragma once

// Entropy pairs (psi_delta, rho) for the conditional decay of int n^p once
// the signal is small:
//
//   psi_delta(s) = p * int_0^s sigma^(p-1) / (1 + delta sigma^q) dsigma
//   rho(sigma)   = (2 eta - sigma)^(-theta),   0 <= sigma < 2 eta
//
// with q = p - 9/5 and (theta, eta) chosen so that
//   5 p theta / (theta + 1) <= 1   and   4 p (p-1) chi1^2 eta^2 / (theta (theta+1)) <= 1.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctns {

struct EntropyPair {
  double p = 2.0;
  double q = 0.2;
  double delta = 0.1;
  double theta = 1.0 / 9.0;
  double eta = 0.1;
  double chi1 = 1.0;

  /// Throws DomainError unless q in (0, p-1), delta, theta in (0,1),
  /// eta in (0,1) and chi1 > 0.
  void validate() const;
  /// 5 p theta / (theta + 1); must not exceed 1.
  double theta_condition() const;
  /// 4 p (p-1) chi1^2 eta^2 / (theta (theta + 1)); must not exceed 1.
  double eta_condition() const;
};

/// theta = 1/(5p - 1), eta = min(0.99, sqrt(theta (theta+1) / (4 p (p-1) chi1^2))),
/// q = p - 9/5. Both smallness conditions hold with equality unless the cap
/// is active.
EntropyPair select_parameters(double p, double chi1, double delta = 0.1);

/// psi_delta(s) by adaptive Gauss-Kronrod quadrature (relative tolerance
/// 1e-12). Throws DomainError for s < 0 and SolverError if the quadrature
/// does not converge.
double psi_delta(const EntropyPair& pair, double s);
/// psi_delta at many points: sorted, then psi' integrated between neighbours.
/// Agrees with psi_delta to about 1e-12 relative.
void psi_delta_batch(const EntropyPair& pair, std::span<const double> s, std::span<double> out);

struct PsiDerivatives {
  double d1;
  double d2;
};
/// Closed-form psi' and psi''. Throws DomainError for s <= 0.
PsiDerivatives psi_derivatives(const EntropyPair& pair, double s);

struct RhoValues {
  double value;
  double d1;
  double d2;
};
/// rho, rho', rho''. Throws DomainError unless 0 <= sigma < 2 eta.
RhoValues rho_eval(const EntropyPair& pair, double sigma);

struct AdmissibilityReport {
  bool pass = true;
  /// max over the grid of LHS / RHS.
  double max_ratio = 0.0;
  double argmax_s = 0.0;
  double argmax_sigma = 0.0;
  /// LHS / RHS for every (s, sigma), s-major; size s_grid.size() * sigma_grid.size().
  std::vector<double> ratio_field;
};

/// 4 psi'^2 rho'^2 + chi0^2 s^2 psi''^2 rho^2 <= 2 psi psi'' rho rho'' on the
/// grid, relative slack 1e-10. chi0 defaults to the pair's chi1.
AdmissibilityReport check_admissibility(const EntropyPair& pair, std::span<const double> s_grid,
                                        std::span<const double> sigma_grid,
                                        std::optional<double> chi0 = std::nullopt);

struct AdmissibilityGrid {
  std::vector<double> s;
  std::vector<double> sigma;
};
/// Uniform grid over (0, s_max] x [0, eta] plus refinement points near s = 0.
AdmissibilityGrid default_admissibility_grid(const EntropyPair& pair, std::size_t n_s = 200,
                                             std::size_t n_sigma = 200, double s_max = 100.0);

struct Lemma62Report {
  bool pass = true;
  double ratio_bound = 0.0;      // p / (p - q - 1)
  double max_ratio = 0.0;        // max psi'^2 / (psi psi'')
  double curvature_bound = 0.0;  // p (p - 1)
  double max_curvature = 0.0;    // max s^2 psi'' / psi
  double asymptote = 0.0;        // p (p - q - 1) / delta
  double asymptote_observed = 0.0;  // s^(-p+q+2) psi''(s) at s_max
  double asymptote_rel_error = 0.0;
  bool ratio_ok = true;
  bool curvature_ok = true;
  bool asymptote_ok = true;
  std::vector<std::string> violations;
};

/// Checks the three growth bounds of psi_delta on the grid; the asymptotic
/// limit is compared at the largest grid point with 5% relative tolerance.
Lemma62Report check_lemma62_bounds(const EntropyPair& pair, std::span<const double> s_grid);

}  // namespace ctns
