#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctns/coefficients.hpp"
#include "ctns/error.hpp"

using namespace ctns;

TEST(FEps, IdentityAtZeroEpsilon) {
  const auto r = f_eps_eval(RegularizedF{0.0}, 3.7);
  EXPECT_EQ(r.value, 3.7);
  EXPECT_EQ(r.derivative, 1.0);
}

TEST(FEps, ClosedFormAtOne) {
  const auto r = f_eps_eval(RegularizedF{1.0}, 1.0);
  EXPECT_NEAR(r.value, 0.6931471805599453, 1e-15);
  EXPECT_EQ(r.derivative, 0.5);
  const auto z = f_eps_eval(RegularizedF{1.0}, 0.0);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.derivative, 1.0);
}

TEST(FEps, NegativeArgumentIsDomainError) {
  EXPECT_THROW(f_eps_eval(RegularizedF{0.5}, -1e-3), DomainError);
  EXPECT_THROW(f_eps_eval(RegularizedF{-0.5}, 1.0), DomainError);
}

TEST(FEps, SandwichedBetweenSaturationAndIdentity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eps(1e-6, 1.0), s(0.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double e = eps(rng), x = s(rng);
    const double v = RegularizedF{e}.value(x);
    EXPECT_LE(x / (1.0 + e * x), v * (1.0 + 1e-14));
    EXPECT_LE(v, x * (1.0 + 1e-14));
  }
}

TEST(FEps, ConvergesToIdentity) {
  for (double x : linspace(0.0, 100.0, 1001))
    EXPECT_LE(std::abs(RegularizedF{1e-8}.value(x) - x), 1e-6 * x + 1e-300);
}

TEST(CheckF, RegularizedPasses) {
  EXPECT_TRUE(check_F_conditions(RegularizedF{0.5}, linspace(0.0, 10.0, 1000)).pass);
  EXPECT_TRUE(check_F_conditions(RegularizedF{0.0}, linspace(0.0, 10.0, 1000)).pass);
}

TEST(CheckF, CorruptedValueNamed) {
  auto F = [](double s) { return s == 1.0 ? 0.4 : s; };
  auto dF = [](double) { return 1.0; };
  const std::vector<double> samples{0.0, 0.5, 1.0};
  const auto rep = check_F_conditions(F, dF, samples);
  ASSERT_FALSE(rep.pass);
  ASSERT_EQ(rep.violations.size(), 1u);
  EXPECT_EQ(rep.violations[0], "F(1)=0.4 < 0.5");
  EXPECT_EQ(rep.first_index, 2u);
}

TEST(CheckF, EmptySamplesRejected) {
  EXPECT_THROW(check_F_conditions(RegularizedF{0.5}, std::vector<double>{}), DomainError);
}

TEST(Structural, PrototypePasses) {
  const auto s = linspace(1e-3, 10.0, 1000);
  EXPECT_TRUE(check_structural(Sensitivity::constant(1.0), Consumption::linear(), s).pass);
  EXPECT_TRUE(check_structural(Sensitivity::constant(2.0), Consumption::linear(), s).pass);
  for (int n : {3, 17, 10000})
    EXPECT_TRUE(check_structural(Sensitivity::constant(0.3), Consumption::linear(),
                                 linspace(1e-3, 5.0, std::size_t(n)))
                    .pass);
}

TEST(Structural, QuadraticConsumptionFailsConcavity) {
  const auto x = linspace(0.0, 4.0, 41);
  std::vector<double> y;
  for (double v : x) y.push_back(v * v);
  const auto rep =
      check_structural(Sensitivity::constant(1.0), Consumption::tabulated(x, y), linspace(0.5, 3.5, 50));
  ASSERT_FALSE(rep.pass);
  bool named = false;
  for (const auto& v : rep.violations) named = named || v.rfind("(f/chi)''", 0) == 0;
  EXPECT_TRUE(named);
}

TEST(ChiOverF, ConstantCases) {
  EXPECT_NEAR(chi_over_f_lower(Sensitivity::constant(1.0), Consumption::linear(), 1.0), 1.0, 1e-15);
  EXPECT_NEAR(chi_over_f_lower(Sensitivity::constant(2.0), Consumption::linear(), 1.0), 0.5, 1e-15);
}

TEST(ChiOverF, TabulatedAgainstDenseScan) {
  const Sensitivity chi = Sensitivity::tabulated({0, 0.5, 1, 2}, {1.0, 0.8, 0.7, 0.65});
  const Consumption f = Consumption::tabulated({0, 0.5, 1, 2}, {0.0, 0.45, 0.8, 1.3});
  const double got = chi_over_f_lower(chi, f, 2.0);
  double brute = INFINITY;
  for (int k = 1; k <= 100000; ++k) {
    const double s = 2.0 * k / 100000.0;
    brute = std::min(brute, f(s) / (s * chi(s)));
  }
  EXPECT_NEAR(got, brute, 1e-4 * brute);
}

TEST(Spline, InterpolatesAndExtendsLinearly) {
  const CubicSpline sp({0, 1, 2, 3}, {0, 1, 8, 27});
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(sp.value(i), double(i * i * i), 1e-14);
  EXPECT_NEAR(sp.d2(0.0), 0.0, 1e-14);
  EXPECT_NEAR(sp.d2(3.0), 0.0, 1e-12);
  EXPECT_NEAR(sp.value(4.0), 27.0 + sp.d1(3.0), 1e-12);
}

TEST(Spline, LinearDataReproduced) {
  const CubicSpline sp({0, 0.3, 1, 2}, {1, 1.6, 3, 5});
  for (double s : linspace(0.0, 2.0, 37)) {
    EXPECT_NEAR(sp.value(s), 1.0 + 2.0 * s, 1e-13);
    EXPECT_NEAR(sp.d1(s), 2.0, 1e-12);
    EXPECT_NEAR(sp.d2(s), 0.0, 1e-11);
  }
}

TEST(Potential, LinearGravityGradient) {
  const Grid g = Grid::make(8, 4);
  const Potential phi = Potential::linear_gravity({0.0, -2.0, 0.0}, 0.5);
  const VectorField gp = phi.face_gradient(g);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j <= 4; ++j) EXPECT_EQ(gp.at(1, i, j), (j == 0 || j == 4) ? 0.0 : -0.5);
  for (double v : gp.component(0)) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(phi.gradient_linf(g), 0.5);
}

TEST(Sensitivity, SupSamplesKnots) {
  const Sensitivity chi = Sensitivity::tabulated({0, 0.5, 1}, {1.0, 1.2, 0.9});
  EXPECT_GE(chi.sup(0.0, 1.0), 1.2);
  EXPECT_EQ(Sensitivity::constant(3.0).sup(0.0, 1.0), 3.0);
}
