#include "ctns/entropy.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ctns/error.hpp"

namespace ctns {

namespace {

constexpr double kRelSlack = 1e-10;

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void EntropyPair::validate() const {
  if (!(p >= 2.0)) throw DomainError("entropy pair requires p >= 2");
  if (!(q > 0.0 && q < p - 1.0)) throw DomainError("entropy pair requires q in (0, p-1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("entropy pair requires delta in (0,1)");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("entropy pair requires theta in (0,1)");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("entropy pair requires eta in (0,1)");
  if (!(chi1 > 0.0)) throw DomainError("entropy pair requires chi1 > 0");
}

double EntropyPair::theta_condition() const { return 5.0 * p * theta / (theta + 1.0); }

double EntropyPair::eta_condition() const {
  return 4.0 * p * (p - 1.0) * chi1 * chi1 * eta * eta / (theta * (theta + 1.0));
}

EntropyPair select_parameters(double p, double chi1, double delta) {
  if (!(p >= 2.0)) throw DomainError("select_parameters requires p >= 2");
  if (!(chi1 > 0.0)) throw DomainError("select_parameters requires chi1 > 0");
  EntropyPair pair;
  pair.p = p;
  pair.q = p - 9.0 / 5.0;
  pair.delta = delta;
  pair.chi1 = chi1;
  pair.theta = 1.0 / (5.0 * p - 1.0);
  pair.eta = std::min(
      0.99, std::sqrt(pair.theta * (pair.theta + 1.0) / (4.0 * p * (p - 1.0) * chi1 * chi1)));
  return pair;
}

double psi_delta(const EntropyPair& pair, double s) {
  if (!(s >= 0.0)) throw DomainError("psi_delta requires s >= 0");
  if (s == 0.0) return 0.0;
  const double p = pair.p, q = pair.q, delta = pair.delta;
  // sigma = s tau^(1/q) turns the integrand into a smooth function of tau
  // for the usual q = p - 9/5.
  const double m = 1.0 / q;
  const double expo = m * p - 1.0;
  const double a = delta * std::pow(s, q);
  auto integrand = [=](double tau) { return std::pow(tau, expo) / (1.0 + a * tau); };
  double error = 0.0, l1 = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, 1.0, 20, 1e-13, &error, &l1);
  if (!(error <= 1e-12 * std::abs(integral)) && error > 1e-300)
    throw SolverError("psi_delta quadrature did not reach relative tolerance 1e-12",
                      error / std::abs(integral), 0);
  return p * m * std::pow(s, p) * integral;
}

namespace {

template <class Fn>
double segment_integral(const Fn& fn, double a, double b, double abs_tol, int depth) {
  double error = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 0, 0.0, &error);
  if (error <= abs_tol || depth == 0) return v;
  const double m = 0.5 * (a + b);
  return segment_integral(fn, a, m, 0.5 * abs_tol, depth - 1) +
         segment_integral(fn, m, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace

void psi_delta_batch(const EntropyPair& pair, std::span<const double> s, std::span<double> out) {
  if (out.size() != s.size()) throw DomainError("psi_delta_batch: output size mismatch");
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
  const double p = pair.p, q = pair.q, delta = pair.delta;
  auto d1 = [=](double x) { return p * std::pow(x, p - 1.0) / (1.0 + delta * std::pow(x, q)); };
  double prev_s = 0.0, prev_psi = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double x = s[order[k]];
    if (!(x >= 0.0)) throw DomainError("psi_delta requires s >= 0");
    if (x == prev_s) {
      out[order[k]] = prev_psi;
      continue;
    }
    if (prev_s == 0.0) {
      prev_psi = psi_delta(pair, x);
    } else {
      // psi' is smooth away from 0. Neighbouring values can be closer than
      // the rounding of psi itself, so the tolerance is absolute, scaled by
      // the accumulated psi, rather than relative to the segment.
      prev_psi += segment_integral(d1, prev_s, x, 1e-14 * prev_psi, 10);
    }
    prev_s = x;
    out[order[k]] = prev_psi;
  }
}

PsiDerivatives psi_derivatives(const EntropyPair& pair, double s) {
  if (!(s > 0.0)) throw DomainError("psi_derivatives requires s > 0");
  const double p = pair.p, q = pair.q, delta = pair.delta;
  const double sq = delta * std::pow(s, q);
  const double den = 1.0 + sq;
  const double d1 = p * std::pow(s, p - 1.0) / den;
  const double d2 = p * std::pow(s, p - 2.0) * ((p - 1.0) + (p - q - 1.0) * sq) / (den * den);
  return {d1, d2};
}

RhoValues rho_eval(const EntropyPair& pair, double sigma) {
  if (!(sigma >= 0.0 && sigma < 2.0 * pair.eta))
    throw DomainError("rho is defined on [0, 2 eta); got sigma = " + num(sigma) +
                      " with eta = " + num(pair.eta));
  const double th = pair.theta;
  const double gap = 2.0 * pair.eta - sigma;
  return {std::pow(gap, -th), th * std::pow(gap, -th - 1.0),
          th * (th + 1.0) * std::pow(gap, -th - 2.0)};
}

AdmissibilityReport check_admissibility(const EntropyPair& pair, std::span<const double> s_grid,
                                        std::span<const double> sigma_grid,
                                        std::optional<double> chi0) {
  const double chi = chi0.value_or(pair.chi1);
  std::vector<RhoValues> rho;
  rho.reserve(sigma_grid.size());
  for (double sigma : sigma_grid) rho.push_back(rho_eval(pair, sigma));

  AdmissibilityReport rep;
  rep.ratio_field.reserve(s_grid.size() * sigma_grid.size());
  for (double s : s_grid) {
    if (!(s > 0.0)) throw DomainError("admissibility grid needs s > 0");
    const double psi = psi_delta(pair, s);
    const auto dpsi = psi_derivatives(pair, s);
    for (std::size_t j = 0; j < sigma_grid.size(); ++j) {
      const RhoValues& r = rho[j];
      const double lhs = 4.0 * dpsi.d1 * dpsi.d1 * r.d1 * r.d1 +
                         chi * chi * s * s * dpsi.d2 * dpsi.d2 * r.value * r.value;
      const double rhs = 2.0 * psi * dpsi.d2 * r.value * r.d2;
      const double ratio = lhs / rhs;
      rep.ratio_field.push_back(ratio);
      if (ratio > rep.max_ratio || !std::isfinite(ratio)) {
        rep.max_ratio = ratio;
        rep.argmax_s = s;
        rep.argmax_sigma = sigma_grid[j];
      }
      if (!(lhs <= rhs * (1.0 + kRelSlack))) rep.pass = false;
    }
  }
  return rep;
}

AdmissibilityGrid default_admissibility_grid(const EntropyPair& pair, std::size_t n_s,
                                             std::size_t n_sigma, double s_max) {
  AdmissibilityGrid g;
  for (double s : {1e-8, 1e-6, 1e-4, 1e-2}) g.s.push_back(s);
  for (std::size_t i = 1; i <= n_s; ++i) g.s.push_back(s_max * double(i) / double(n_s));
  for (std::size_t j = 0; j < n_sigma; ++j)
    g.sigma.push_back(n_sigma == 1 ? 0.0 : pair.eta * double(j) / double(n_sigma - 1));
  return g;
}

Lemma62Report check_lemma62_bounds(const EntropyPair& pair, std::span<const double> s_grid) {
  if (s_grid.empty()) throw DomainError("check_lemma62_bounds: empty grid");
  const double p = pair.p, q = pair.q, delta = pair.delta;
  Lemma62Report rep;
  rep.ratio_bound = p / (p - q - 1.0);
  rep.curvature_bound = p * (p - 1.0);
  rep.asymptote = p * (p - q - 1.0) / delta;
  double s_max = 0.0;
  for (double s : s_grid) {
    if (!(s > 0.0)) throw DomainError("check_lemma62_bounds: grid needs s > 0");
    s_max = std::max(s_max, s);
    const double psi = psi_delta(pair, s);
    const auto d = psi_derivatives(pair, s);
    const double ratio = d.d1 * d.d1 / (psi * d.d2);
    const double curv = s * s * d.d2 / psi;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.max_curvature = std::max(rep.max_curvature, curv);
  }
  if (rep.max_ratio > rep.ratio_bound * (1.0 + kRelSlack)) {
    rep.ratio_ok = false;
    rep.violations.push_back("psi'^2/(psi psi'') reaches " + num(rep.max_ratio) + " > " +
                             num(rep.ratio_bound));
  }
  if (rep.max_curvature > rep.curvature_bound * (1.0 + kRelSlack)) {
    rep.curvature_ok = false;
    rep.violations.push_back("s^2 psi''/psi reaches " + num(rep.max_curvature) + " > " +
                             num(rep.curvature_bound));
  }
  rep.asymptote_observed = std::pow(s_max, -p + q + 2.0) * psi_derivatives(pair, s_max).d2;
  rep.asymptote_rel_error = std::abs(rep.asymptote_observed - rep.asymptote) / rep.asymptote;
  if (rep.asymptote_rel_error > 0.05) {
    rep.asymptote_ok = false;
    rep.violations.push_back("s^(-p+q+2) psi''(s) at s=" + num(s_max) + " is " +
                             num(rep.asymptote_observed) + ", " +
                             num(100.0 * rep.asymptote_rel_error) + "% from " +
                             num(rep.asymptote));
  }
  rep.pass = rep.ratio_ok && rep.curvature_ok && rep.asymptote_ok;
  return rep;
}

}  // namespace ctns
