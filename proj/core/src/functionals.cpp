#include "ctns/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ctns/error.hpp"
#include "ctns/stencil.hpp"

namespace ctns {

namespace {

void require_nonnegative(const ScalarField& f, const char* name) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] < 0.0)
      throw DomainError(std::string(name) + " is negative at cell " + std::to_string(i));
}

// Cell-centred velocity components (average of the two faces).
std::array<std::vector<double>, 3> cell_velocity(const VectorField& u) {
  const Grid& g = u.grid();
  std::array<std::vector<double>, 3> out;
  for (int d = 0; d < g.dim; ++d) {
    out[d].assign(g.cell_count(), 0.0);
    double* o = out[d].data();
    const double* comp = u.component(d).data();
    for_each_cell_faces(g, d, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      o[c] = 0.5 * (comp[lo] + comp[hi]);
    });
  }
  return out;
}

}  // namespace

EnergyParts energy_parts(const ScalarField& n, const ScalarField& c, const VectorField& u,
                         const Sensitivity& chi, const Consumption& f, double kappa,
                         double sigma_c) {
  require_nonnegative(n, "n");
  require_nonnegative(c, "c");
  const Grid& g = n.grid();
  const double vol = g.cell_volume();
  EnergyParts parts;

  std::vector<double> t(n.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = n[i] > 0.0 ? n[i] * std::log(n[i]) : 0.0;
  parts.entropy = pairwise_sum(t) * vol;

  double signal = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    std::vector<double> terms(g.face_count(d), 0.0);
    const double inv_h = 1.0 / g.h[d];
    for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
      const double cf = 0.5 * (c[l] + c[r]);
      const double grad = (c[r] - c[l]) * inv_h;
      terms[face] = chi(cf) / f(std::max(cf, sigma_c)) * grad * grad;
    });
    signal += pairwise_sum(terms);
  }
  parts.signal = 0.5 * signal * vol;
  parts.kinetic = kappa * inner(u, u);
  return parts;
}

double energy_F(const ScalarField& n, const ScalarField& c, const VectorField& u,
                const Sensitivity& chi, const Consumption& f, double kappa, double sigma_c) {
  return energy_parts(n, c, u, chi, f, kappa, sigma_c).total();
}

double dissipation_D(const ScalarField& n, const ScalarField& c, const VectorField& u,
                     double sigma_n, double sigma_c) {
  const Grid& g = n.grid();
  const double vol = g.cell_volume();

  double dn = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    std::vector<double> terms(g.face_count(d), 0.0);
    const double inv_h = 1.0 / g.h[d];
    for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
      const double grad = (n[r] - n[l]) * inv_h;
      terms[face] = grad * grad / std::max(0.5 * (n[l] + n[r]), sigma_n);
    });
    dn += pairwise_sum(terms);
  }

  // |grad c|^2 at cell centres from the averaged face gradients.
  const VectorField gc = gradient(c);
  const auto gcc = cell_velocity(gc);
  std::vector<double> terms(g.cell_count());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double s = 0.0;
    for (int d = 0; d < g.dim; ++d) s += gcc[d][i] * gcc[d][i];
    const double cm = std::max(c[i], sigma_c);
    terms[i] = s * s / (cm * cm * cm);
  }
  const double dc = pairwise_sum(terms);

  return (dn + dc) * vol + vector_grad_sq(u);
}

double forcing_work(const ScalarField& n, const VectorField& u, const VectorField& grad_phi) {
  const Grid& g = n.grid();
  double total = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    std::vector<double> terms(g.face_count(d), 0.0);
    const auto uc = u.component(d);
    const auto pc = grad_phi.component(d);
    for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
      terms[face] = 0.5 * (n[l] + n[r]) * uc[face] * pc[face];
    });
    total += pairwise_sum(terms);
  }
  return total * g.cell_volume();
}

NsEnergyTerms ns_energy_terms(const ScalarField& n, const VectorField& u, const Potential& phi) {
  NsEnergyTerms t;
  t.kinetic = kinetic_energy(u);
  t.grad_u_sq = vector_grad_sq(u);
  t.forcing_work = forcing_work(n, u, phi.face_gradient(u.grid()));
  return t;
}

double entropy_value(const EntropyPair& pair, const ScalarField& n, const ScalarField& c) {
  const double limit = 2.0 * pair.eta;
  std::vector<double> terms(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(c[i] < limit) || c[i] < 0.0)
      throw DomainError("entropy weight undefined at cell " + std::to_string(i) + ": c = " +
                        std::to_string(c[i]) + " outside [0, 2 eta = " + std::to_string(limit) +
                        ")");
    if (n[i] < 0.0) throw DomainError("n is negative at cell " + std::to_string(i));
  }
  psi_delta_batch(pair, n.values(), terms);
  for (std::size_t i = 0; i < n.size(); ++i) terms[i] *= rho_eval(pair, c[i]).value;
  return pairwise_sum(terms) * n.grid().cell_volume();
}

double weighted_grad_sq(const ScalarField& n, double p) {
  const Grid& g = n.grid();
  double total = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    std::vector<double> terms(g.face_count(d), 0.0);
    const double inv_h = 1.0 / g.h[d];
    for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
      const double grad = (n[r] - n[l]) * inv_h;
      const double mean = 0.5 * (n[l] + n[r]);
      const double w = p == 2.0 ? 1.0 : p == 3.0 ? mean : std::pow(mean, p - 2.0);
      terms[face] = w * grad * grad;
    });
    total += pairwise_sum(terms);
  }
  return total * g.cell_volume();
}

Lemma433Report lemma433_check(const ScalarField& phi, const RegularizedF& F) {
  require_nonnegative(phi, "phi");
  const double vol = phi.grid().cell_volume();
  std::vector<double> cube(phi.size()), fv(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    cube[i] = phi[i] * phi[i] * phi[i];
    fv[i] = F.value(phi[i]);
  }
  Lemma433Report rep;
  rep.m = integrate(phi);
  rep.B = std::max(pairwise_sum(cube) * vol, rep.m / 8.0);
  rep.bound = rep.B > 0.0 ? std::sqrt(rep.m * rep.m * rep.m / (128.0 * rep.B)) : 0.0;
  rep.lhs = pairwise_sum(fv) * vol;
  rep.pass = rep.lhs >= rep.bound - 1e-12;
  return rep;
}

double velocity_power_integral(const VectorField& u, double power) {
  const Grid& g = u.grid();
  const auto uc = cell_velocity(u);
  std::vector<double> terms(g.cell_count());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double s = 0.0;
    for (int d = 0; d < g.dim; ++d) s += uc[d][i] * uc[d][i];
    // s^(5/3) by cube root, much cheaper than pow on the per-step path.
    terms[i] = power == 10.0 / 3.0 ? s * std::cbrt(s * s) : std::pow(s, 0.5 * power);
  }
  return pairwise_sum(terms) * g.cell_volume();
}

void GnAccumulator::add(const VectorField& u, double dt) {
  u_pow_ += dt * velocity_power_integral(u, 10.0 / 3.0);
  grad_sq_ += dt * vector_grad_sq(u);
  sup_l2_ = std::max(sup_l2_, std::sqrt(inner(u, u)));
  ++samples_;
}

std::optional<double> GnAccumulator::ratio() const {
  if (samples_ < 2) return std::nullopt;
  const double den = grad_sq_ * std::pow(sup_l2_, 4.0 / 3.0);
  if (!(den > 0.0)) return std::nullopt;
  return u_pow_ / den;
}

}  // namespace ctns
