#include "ctns/chemotaxis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctns/error.hpp"
#include "ctns/stencil.hpp"

namespace ctns {

namespace {

std::size_t cell_stride(const Grid& g, int d) {
  return d == 0 ? std::size_t(g.n[1]) * g.n[2] : d == 1 ? std::size_t(g.n[2]) : 1;
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return a > 0.0 ? std::min(a, b) : std::max(a, b);
}

// Value of q on face (left, right) seen from the upwind side; m is the
// index of the right cell along d.
struct Reconstruction {
  const double* q;
  const Grid& g;
  Limiter limiter;

  double operator()(int d, int m, std::size_t left, std::size_t right, double velocity) const {
    if (limiter == Limiter::Upwind) return velocity >= 0.0 ? q[left] : q[right];
    const std::size_t s = cell_stride(g, d);
    if (velocity >= 0.0) {
      const bool has_ll = m - 1 > 0;
      const double slope = has_ll ? minmod(q[left] - q[left - s], q[right] - q[left]) : 0.0;
      return q[left] + 0.5 * slope;
    }
    const bool has_rr = m + 1 < g.n[d];
    const double slope = has_rr ? minmod(q[right] - q[left], q[right + s] - q[right]) : 0.0;
    return q[right] - 0.5 * slope;
  }
};

void require_nonnegative(const ScalarField& f, const char* name) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!(f[i] >= 0.0))
      throw DomainError(std::string(name) + " is negative or NaN at cell " + std::to_string(i));
}

// q - dt div(flux); flux(d, m, left, right, face) gives the interior face
// flux, m being the index of the right cell along d.
template <class Flux>
ScalarField conservative_update(const ScalarField& q, double dt, Flux&& flux) {
  const Grid& g = q.grid();
  ScalarField out = q;
  double* o = out.values().data();
  for (int d = 0; d < g.dim; ++d) {
    const double lambda = dt / g.h[d];
    for_each_interior_face_indexed(
        g, d, [&](std::size_t face, std::size_t left, std::size_t right, int m) {
          const double fl = lambda * flux(d, m, left, right, face);
          o[left] -= fl;
          o[right] += fl;
        });
  }
  return out;
}

}  // namespace

double outflow_courant(const VectorField& u, const VectorField* drift, double dt) {
  const Grid& g = u.grid();
  std::vector<double> out(g.cell_count(), 0.0);
  double* o = out.data();
  auto accumulate = [&](const VectorField& v) {
    for (int d = 0; d < g.dim; ++d) {
      const double* comp = v.component(d).data();
      const double inv_h = 1.0 / g.h[d];
      for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
        const double vf = comp[face] * inv_h;
        o[l] += std::max(vf, 0.0);
        o[r] += std::max(-vf, 0.0);
      });
    }
  };
  accumulate(u);
  if (drift) accumulate(*drift);
  return dt * (out.empty() ? 0.0 : *std::max_element(out.begin(), out.end()));
}

VectorField chemotactic_velocity(const ScalarField& c, const Sensitivity& chi) {
  const Grid& g = c.grid();
  VectorField w = gradient(c);
  if (chi.is_constant()) {
    const double k = chi.constant_value();
    for (int d = 0; d < g.dim; ++d)
      for (double& v : w.component(d)) v *= k;
    return w;
  }
  for (int d = 0; d < g.dim; ++d) {
    double* comp = w.component(d).data();
    for_each_interior_face(g, d, [&](std::size_t face, std::size_t l, std::size_t r) {
      comp[face] *= chi(0.5 * (c[l] + c[r]));
    });
  }
  return w;
}

ScalarField n_step(const ScalarField& n, const ScalarField& c, const VectorField& u,
                   const Sensitivity& chi, const RegularizedF& F,
                   const TransportStepParams& params) {
  require_nonnegative(n, "n");
  const VectorField w = chemotactic_velocity(c, chi);
  const double courant = outflow_courant(u, &w, params.dt);
  if (courant > params.cfl_max)
    throw CflError("cell transport exceeds the outflow Courant limit", courant);

  const Reconstruction rec{n.values().data(), n.grid(), params.limiter};
  const ScalarField mid = conservative_update(
      n, params.dt, [&](int d, int m, std::size_t l, std::size_t r, std::size_t f) {
        const double uf = u.component(d)[f];
        const double wf = w.component(d)[f];
        const double na = rec(d, m, l, r, uf);
        const double nc = rec(d, m, l, r, wf);
        // n F'(n) = n / (1 + eps n) for the regularized flux.
        return uf * na + wf * nc * F.derivative(nc);
      });
  return laplacian_solve(mid, params.dt, ScalarBc::Neumann, params.solve);
}

CStepResult c_step(const ScalarField& c, const ScalarField& n, const VectorField& u,
                   const Consumption& f, const RegularizedF& F,
                   const TransportStepParams& params) {
  require_nonnegative(c, "c");
  require_nonnegative(n, "n");
  const double dt = params.dt;
  const double courant = outflow_courant(u, nullptr, dt);
  if (courant > params.cfl_max)
    throw CflError("signal transport exceeds the outflow Courant limit", courant);

  const Reconstruction rec{c.values().data(), c.grid(), params.limiter};
  const ScalarField adv = conservative_update(
      c, dt, [&](int d, int m, std::size_t l, std::size_t r, std::size_t face) {
        const double uf = u.component(d)[face];
        return uf * rec(d, m, l, r, uf);
      });

  CStepResult res;
  res.c_mid = laplacian_solve(adv, dt, ScalarBc::Neumann, params.solve);
  res.grad_sq_mid = grad_sq(res.c_mid, ScalarBc::Neumann);
  res.c = ScalarField(c.grid());
  res.consumption = ScalarField(c.grid());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double cm = std::max(res.c_mid[i], 0.0);
    const double k = dt * F.value(n[i]);
    double next;
    if (params.consumption == ConsumptionMode::ExplicitClipped) {
      next = std::max(0.0, cm - k * f(cm));
    } else if (f.is_linear()) {
      next = cm / (1.0 + k);
    } else {
      // x + k f(x) = cm on [0, cm]: Newton safeguarded by bisection.
      double lo = 0.0, hi = cm, x = cm / (1.0 + k * std::max(f.eval(cm).d1, 0.0));
      for (int it = 0; it < 100; ++it) {
        const Derivs fx = f.eval(x);
        const double g = x + k * fx.value - cm;
        if (std::abs(g) <= 1e-15 * std::max(cm, 1e-300)) break;
        if (g > 0.0)
          hi = x;
        else
          lo = x;
        const double dg = 1.0 + k * fx.d1;
        double step = dg > 0.0 ? x - g / dg : 0.5 * (lo + hi);
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        if (step == x) break;
        x = step;
      }
      next = x;
    }
    res.c[i] = next;
    res.consumption[i] = (res.c_mid[i] - next) / dt;
  }
  return res;
}

double power_integral(const ScalarField& c, double p) {
  std::vector<double> t(c.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = p == 1.0 ? c[i] : p == 2.0 ? c[i] * c[i] : std::pow(c[i], p);
  return pairwise_sum(t) * c.grid().cell_volume();
}

Lemma31Tracker::Integrand Lemma31Tracker::integrand(const ScalarField& c, const ScalarField& n,
                                                    const Consumption& f,
                                                    const RegularizedF& F) {
  Integrand in;
  in.grad_sq = grad_sq(c, ScalarBc::Neumann);
  std::vector<double> t1(c.size()), t2(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    t1[i] = F.value(n[i]) * f(c[i]);
    t2[i] = t1[i] * c[i];
  }
  const double vol = c.grid().cell_volume();
  in.cons[0] = pairwise_sum(t1) * vol;
  in.cons[1] = pairwise_sum(t2) * vol;
  return in;
}

Lemma31Tracker::Lemma31Tracker(const ScalarField& c, const ScalarField& n, const Consumption& f,
                               const RegularizedF& F)
    : f_(f), F_(F) {
  base_[0] = current_[0] = power_integral(c, 1.0);
  base_[1] = current_[1] = power_integral(c, 2.0);
  last_ = integrand(c, n, f, F);
}

void Lemma31Tracker::add_step(const CStepResult& step, const ScalarField& n_new, double dt) {
  const ScalarField& c = step.c;
  current_[0] = power_integral(c, 1.0);
  current_[1] = power_integral(c, 2.0);

  // Scheme quadrature: diffusion dissipates through c_mid, consumption
  // removes (c_mid - c) / dt.
  diss_[1] += dt * 2.0 * step.grad_sq_mid;
  std::vector<double> kc(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) kc[i] = step.consumption[i] * c[i];
  const double vol = c.grid().cell_volume();
  cons_[0] += dt * pairwise_sum(step.consumption.values()) * vol;
  cons_[1] += dt * 2.0 * pairwise_sum(kc) * vol;

  const Integrand next = integrand(c, n_new, f_, F_);
  trap_[0] += 0.5 * dt * (last_.cons[0] + next.cons[0]);
  trap_[1] += 0.5 * dt * (2.0 * (last_.grad_sq + next.grad_sq) +
                          2.0 * (last_.cons[1] + next.cons[1]));
  last_ = next;
}

double Lemma31Tracker::scheme_residual(int p) const {
  if (p != 1 && p != 2) throw DomainError("Lemma31Tracker supports p = 1, 2");
  return current_[p - 1] + diss_[p - 1] + cons_[p - 1] - base_[p - 1];
}

double Lemma31Tracker::trapezoid_residual(int p) const {
  if (p != 1 && p != 2) throw DomainError("Lemma31Tracker supports p = 1, 2");
  return current_[p - 1] + trap_[p - 1] - base_[p - 1];
}

}  // namespace ctns
