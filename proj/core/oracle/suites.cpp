#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>

#include "ctns/error.hpp"
#include "ctns/fluid.hpp"
#include "ctns/functionals.hpp"
#include "ctns/oracle.hpp"

namespace ctns::oracle {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void add(SuiteResult& r, std::string name, bool pass, std::string detail) {
  r.checks.push_back({std::move(name), pass, std::move(detail)});
}

SuiteResult quadrature_suite() {
  SuiteResult r{"quadrature", {}};
  const double lin = quadrature_reference([](double s) { return s; }, 0.0, 1.0, 10'000);
  add(r, "integral of sigma on [0,1]", std::abs(lin - 0.5) <= 1e-15, fmt("%.17g", lin));
  const double sn = quadrature_reference([](double s) { return std::sin(std::numbers::pi * s); },
                                         0.0, 1.0, 100'000);
  add(r, "integral of sin(pi sigma)", std::abs(sn - 2.0 / std::numbers::pi) <= 1e-12,
      fmt("error %.3e", std::abs(sn - 2.0 / std::numbers::pi)));
  EntropyPair pair;
  pair.delta = 0.5;
  const double ref = psi_reference(pair, 1.0);
  const double val = psi_delta(pair, 1.0);
  add(r, "psi_delta(1), delta 0.5, against Simpson", std::abs(ref - val) <= 1e-9,
      fmt("psi %.15g, reference %.15g", val, ref));
  return r;
}

SuiteResult entropy_suite() {
  SuiteResult r{"entropy", {}};
  const EntropyPair pair = select_parameters(2.0, 1.0);
  add(r, "select_parameters(2,1)",
      std::abs(pair.theta - 1.0 / 9.0) <= 1e-15 && std::abs(pair.eta - 0.124226) <= 5e-7,
      fmt("theta %.12g eta %.12g", pair.theta, pair.eta));
  for (double delta : {1e-3, 0.1, 0.9}) {
    const EntropyPair p = select_parameters(2.0, 1.0, delta);
    const auto grid = default_admissibility_grid(p);
    const auto rep = check_admissibility(p, grid.s, grid.sigma);
    add(r, "admissibility, delta " + fmt("%g", delta), rep.pass,
        fmt("max ratio %.6g at s=%.4g sigma=%.4g", rep.max_ratio, rep.argmax_s, rep.argmax_sigma));
  }
  std::vector<double> s = linspace(0.01, 1e4, 2000);
  const auto rep = check_lemma62_bounds(pair, s);
  add(r, "psi'^2/(psi psi'') bound", rep.ratio_ok,
      fmt("max %.6g, bound %.6g", rep.max_ratio, rep.ratio_bound));
  add(r, "s^2 psi''/psi bound", rep.curvature_ok,
      fmt("max %.6g, bound %.6g", rep.max_curvature, rep.curvature_bound));
  add(r, "psi'' asymptote at s = 1e4", rep.asymptote_ok,
      fmt("observed %.6g, limit %.6g, rel error %.3g", rep.asymptote_observed, rep.asymptote,
          rep.asymptote_rel_error));
  return r;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SuiteResult tiny_grid_suite() {
  SuiteResult r{"tiny-grid", {}};
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0), sym(-1.0, 1.0);
  const Grid g = Grid::make(3, 3);
  double worst_n = 0.0, worst_c = 0.0, worst_mass = 0.0;
  int states = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ScalarField n(g), c(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      n[i] = 2.0 * unit(rng);
      c[i] = unit(rng);
    }
    VectorField u(g);
    for (int d = 0; d < 2; ++d) {
      const auto e = g.face_extent(d);
      for (int i = 0; i < e[0]; ++i)
        for (int j = 0; j < e[1]; ++j)
          if ((d == 0 ? i : j) > 0 && (d == 0 ? i : j) < 3) u.at(d, i, j) = sym(rng);
    }
    const Limiter lim = trial % 2 ? Limiter::MinMod : Limiter::Upwind;
    const double eps = trial % 3 == 0 ? 0.0 : 0.3;
    const Sensitivity chi = trial % 4 < 2 ? Sensitivity::constant(1.0)
                                          : Sensitivity::tabulated({0, 0.5, 1}, {1.0, 0.8, 0.7});
    const Consumption f = trial % 5 < 3 ? Consumption::linear()
                                        : Consumption::tabulated({0, 0.5, 1}, {0.0, 0.45, 0.8});
    TransportStepParams p;
    p.dt = 1e-3;
    p.limiter = lim;
    p.solve = {1e-13, 100};
    const RegularizedF F{eps};
    const ScalarField n1 = n_step(n, c, u, chi, F, p);
    const TinyStep ref_n = tiny_n_step(n, c, u, chi, eps, p.dt, lim);
    worst_n = std::max(worst_n, max_abs_diff(n1.values(), ref_n.values));
    worst_mass = std::max(worst_mass, std::abs(integrate(n1) - integrate(n)));
    const CStepResult c1 = c_step(c, n1, u, f, F, p);
    const TinyStep ref_c = tiny_c_step(c, n1, u, f, eps, p.dt, lim);
    worst_c = std::max(worst_c, max_abs_diff(c1.c.values(), ref_c.values));
    ++states;
  }
  add(r, "n_step against dense reference", worst_n <= 1e-14,
      fmt("%g states, max difference %.3e", states, worst_n));
  add(r, "c_step against dense reference", worst_c <= 1e-14,
      fmt("%g states, max difference %.3e", states, worst_c));
  add(r, "n_step conserves mass", worst_mass <= 1e-14, fmt("max drift %.3e", worst_mass));
  return r;
}

SuiteResult mms_suite() {
  SuiteResult r{"mms", {}};
  for (MmsOperator op : {MmsOperator::HeatNeumann, MmsOperator::AdvDiff,
                         MmsOperator::StokesDiffusion}) {
    const MmsResult m = mms_convergence(op, 3);
    std::string detail;
    for (double o : m.spatial_orders) detail += fmt("space %.3f ", o);
    for (double o : m.temporal_orders) detail += fmt("time %.3f ", o);
    add(r, to_string(op), m.pass, detail);
  }
  return r;
}

SuiteResult stokes_suite() {
  SuiteResult r{"stokes", {}};
  const StokesMode coarse = stokes_eigenmode(Grid::make(16, 16));
  const StokesMode fine = stokes_eigenmode(Grid::make(32, 32));
  const double rel = std::abs(fine.lambda - coarse.lambda) / fine.lambda;
  add(r, "eigenvalue stable under refinement", rel <= 0.02,
      fmt("lambda %.8g -> %.8g (%.3g)", coarse.lambda, fine.lambda, rel));
  add(r, "mode is solenoidal", coarse.max_divergence <= 1e-10,
      fmt("max |div| %.3e", coarse.max_divergence));
  double worst = 0.0;
  for (double eps : {0.0, 0.01, 0.1, 1.0}) {
    const VectorField v = yosida_apply(eps, coarse.mode, 1e-13, 1000);
    const double scale = 1.0 / (1.0 + eps * coarse.lambda);
    for (int d = 0; d < 2; ++d) {
      const auto a = v.component(d), b = coarse.mode.component(d);
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - scale * b[i]));
    }
  }
  add(r, "Yosida scales the mode by 1/(1 + eps lambda)", worst <= 1e-8,
      fmt("max deviation %.3e", worst));
  return r;
}

SuiteResult lemma433_suite() {
  SuiteResult r{"lemma433", {}};
  std::mt19937_64 rng(433);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Grid g = Grid::make(16, 16);
  int failures = 0, total = 0;
  double tightest = INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    ScalarField phi(g);
    // Mix of spread-out and concentrated fields.
    const double spike = std::pow(10.0, 4.0 * unit(rng));
    const double frac = unit(rng);
    for (std::size_t i = 0; i < phi.size(); ++i)
      phi[i] = unit(rng) < frac ? spike * unit(rng) : unit(rng);
    for (double eps : {0.0, 0.5, 1.0}) {
      const auto rep = lemma433_check(phi, RegularizedF{eps});
      ++total;
      if (!rep.pass) ++failures;
      tightest = std::min(tightest, rep.lhs / rep.bound);
    }
  }
  add(r, "int F(phi) >= sqrt(m^3 / (128 B))", failures == 0,
      fmt("%g of %g fields fail; smallest lhs/bound %.4g", failures, total, tightest));
  return r;
}

using SuiteFn = SuiteResult (*)();

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> m{
      {"quadrature", quadrature_suite}, {"entropy", entropy_suite},
      {"tiny-grid", tiny_grid_suite},   {"mms", mms_suite},
      {"stokes", stokes_suite},         {"lemma433", lemma433_suite},
  };
  return m;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  names.push_back("all");
  return names;
}

bool has_suite(const std::string& name) { return name == "all" || registry().count(name); }

SuiteResult run_suite(const std::string& name) {
  if (name == "all") {
    SuiteResult all{"all", {}};
    for (const auto& [n, fn] : registry())
      for (auto& c : fn().checks) all.checks.push_back({n + ": " + c.name, c.pass, c.detail});
    return all;
  }
  const auto it = registry().find(name);
  if (it == registry().end()) throw DomainError("unknown suite '" + name + "'");
  return it->second();
}

}  // namespace ctns::oracle
