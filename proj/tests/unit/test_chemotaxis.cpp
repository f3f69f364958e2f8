#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctns/chemotaxis.hpp"
#include "ctns/error.hpp"
#include "ctns/fluid.hpp"

using namespace ctns;

namespace {

VectorField random_solenoidal(const Grid& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> psi(std::size_t(g.n[0] + 1) * (g.n[1] + 1), 0.0);
  for (int i = 1; i < g.n[0]; ++i)
    for (int j = 1; j < g.n[1]; ++j) psi[std::size_t(i) * (g.n[1] + 1) + j] = amp * g.h[0] * u(rng);
  return curl_of_nodal_stream(g, psi);
}

TransportStepParams params(double dt) {
  TransportStepParams p;
  p.dt = dt;
  p.solve = {1e-13, 500};
  return p;
}

}  // namespace

TEST(NStep, PureHeatConservesAndSmooths) {
  const Grid g = Grid::make(16, 16);
  ScalarField n(g);
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = 1.0 + 0.5 * std::cos(0.3 * double(i));
  const ScalarField c(g, 0.4);
  const VectorField u(g);
  ScalarField cur = n;
  const double mass = integrate(n);
  for (int s = 0; s < 2000; ++s) {
    const ScalarField next =
        n_step(cur, c, u, Sensitivity::constant(1.0), RegularizedF{0.0}, params(1e-3));
    EXPECT_LE(next.max() - next.min(), cur.max() - cur.min() + 1e-15);
    cur = next;
  }
  EXPECT_NEAR(integrate(cur), mass, 1e-13);
  EXPECT_NEAR(cur.max(), mass / g.volume(), 1e-3);
}

TEST(NStep, ConservesMassAndPositivityOnRandomStates) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = Grid::make(12, 10);
  for (int t = 0; t < 100; ++t) {
    ScalarField n(g), c(g);
    for (std::size_t i = 0; i < n.size(); ++i) {
      n[i] = u(rng) < 0.2 ? 0.0 : 3.0 * u(rng);
      c[i] = u(rng);
    }
    const VectorField vel = random_solenoidal(g, rng, 1.0);
    const Limiter lim = t % 2 ? Limiter::MinMod : Limiter::Upwind;
    auto p = params(2e-4);
    p.limiter = lim;
    const ScalarField n1 = n_step(n, c, vel, Sensitivity::constant(1.0), RegularizedF{0.1 * (t % 3)}, p);
    EXPECT_NEAR(integrate(n1), integrate(n), 1e-14 * integrate(n));
    EXPECT_GE(n1.min(), 0.0);
  }
}

TEST(NStep, RejectsNegativeDensityAndLargeSteps) {
  const Grid g = Grid::make(8, 8);
  ScalarField n(g, 1.0);
  n[3] = -1.0;
  EXPECT_THROW(n_step(n, ScalarField(g), VectorField(g), Sensitivity::constant(1.0),
                      RegularizedF{0.0}, params(1e-3)),
               DomainError);
  ScalarField c(g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = double(i % 2) * 100.0;
  EXPECT_THROW(n_step(ScalarField(g, 1.0), c, VectorField(g), Sensitivity::constant(1.0),
                      RegularizedF{0.0}, params(0.1)),
               CflError);
}

TEST(CStep, NoConsumerConservesSignal) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = Grid::make(16, 16);
  ScalarField c(g);
  for (double& v : c.values()) v = u(rng);
  const VectorField vel = random_solenoidal(g, rng, 1.0);
  const auto r = c_step(c, ScalarField(g, 0.0), vel, Consumption::linear(), RegularizedF{0.0},
                        params(1e-3));
  EXPECT_NEAR(integrate(r.c), integrate(c), 1e-13);
}

TEST(CStep, ConstantStateMatchesImplicitEuler) {
  const Grid g = Grid::make(6, 6);
  const double C = 0.8, N = 2.0, dt = 0.01;
  for (double eps : {0.0, 0.5}) {
    const RegularizedF F{eps};
    const auto r = c_step(ScalarField(g, C), ScalarField(g, N), VectorField(g),
                          Consumption::linear(), F, params(dt));
    const double expected = C / (1.0 + dt * F.value(N));
    for (double v : r.c.values()) EXPECT_NEAR(v, expected, 1e-15);
    for (double v : r.consumption.values()) EXPECT_NEAR(v, (C - expected) / dt, 1e-12);
  }
}

TEST(CStep, MaximumPrinciple) {
  std::mt19937_64 rng(431);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = Grid::make(8, 8);
  const Consumption tab = Consumption::tabulated({0, 0.5, 1, 2}, {0.0, 0.45, 0.8, 1.3});
  for (int t = 0; t < 1000; ++t) {
    ScalarField c(g), n(g);
    for (std::size_t i = 0; i < c.size(); ++i) {
      c[i] = u(rng);
      n[i] = 2.0 * u(rng);
    }
    const VectorField vel = random_solenoidal(g, rng, 1.0);
    auto p = params(1e-3);
    p.limiter = t % 2 ? Limiter::MinMod : Limiter::Upwind;
    const auto r = c_step(c, n, vel, t % 3 ? Consumption::linear() : tab, RegularizedF{0.2 * (t % 4)}, p);
    EXPECT_LE(r.c.max(), c.max() + 1e-12);
    EXPECT_GE(r.c.min(), 0.0);
  }
}

TEST(OutflowCourant, SumsOutgoingFaces) {
  const Grid g = Grid::make(4, 4);
  VectorField u(g);
  u.at(0, 2, 1) = 1.0;   // leaves cell (1,1) to the right
  u.at(1, 1, 1) = -2.0;  // leaves cell (1,1) downward
  EXPECT_DOUBLE_EQ(outflow_courant(u, nullptr, 0.01), 0.01 * (1.0 + 2.0) / 0.25);
}

TEST(ChemotacticVelocity, LinearSignal) {
  const Grid g = Grid::make(8, 4);
  ScalarField c(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 4; ++j) c(i, j) = 0.5 * g.cell_center(i, j)[0];
  const VectorField w = chemotactic_velocity(c, Sensitivity::constant(2.0));
  for (int i = 1; i < 8; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(w.at(0, i, j), 1.0, 1e-13);
}

TEST(Lemma31, PureDiffusionConservesMass) {
  const Grid g = Grid::make(16, 16);
  ScalarField c(g);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 + 0.4 * std::sin(0.1 * double(i));
  const ScalarField n(g, 0.0);
  const VectorField u(g);
  const RegularizedF F{0.0};
  const Consumption f = Consumption::linear();
  Lemma31Tracker tr(c, n, f, F);
  for (int s = 0; s < 100; ++s) {
    const auto r = c_step(c, n, u, f, F, params(1e-3));
    tr.add_step(r, n, 1e-3);
    c = r.c;
  }
  EXPECT_NEAR(tr.scheme_residual(1), 0.0, 1e-13);
  EXPECT_LE(tr.scheme_residual(2), 1e-6 * tr.baseline(2));
}

TEST(Lemma31, ResidualBelowToleranceWithConsumption) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = Grid::make(16, 16);
  ScalarField c(g), n(g);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = u(rng);
    n[i] = 2.0 * u(rng);
  }
  const VectorField vel = random_solenoidal(g, rng, 0.5);
  const RegularizedF F{0.1};
  const Consumption f = Consumption::linear();
  Lemma31Tracker tr(c, n, f, F);
  for (int s = 0; s < 50; ++s) {
    const ScalarField n1 = n_step(n, c, vel, Sensitivity::constant(1.0), F, params(5e-4));
    const auto r = c_step(c, n1, vel, f, F, params(5e-4));
    tr.add_step(r, n1, 5e-4);
    c = r.c;
    n = n1;
    for (int p = 1; p <= 2; ++p) EXPECT_LE(tr.scheme_residual(p), 1e-6 * tr.baseline(p));
  }
  EXPECT_GT(tr.consumed(), 0.0);
}

TEST(PowerIntegral, Constant) {
  EXPECT_NEAR(power_integral(ScalarField(Grid::make(4, 4, 2.0, 1.0), 3.0), 2.0), 18.0, 1e-13);
}
