#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctns/coefficients.hpp"
#include "ctns/entropy.hpp"
#include "ctns/error.hpp"
#include "ctns/oracle.hpp"

using namespace ctns;

namespace {

EntropyPair pair_with(double p, double q, double delta) {
  EntropyPair e = select_parameters(p, 1.0, delta);
  e.q = q;
  return e;
}

}  // namespace

TEST(PsiDelta, SmallDeltaApproachesPower) {
  EXPECT_NEAR(psi_delta(pair_with(2.0, 0.2, 1e-10), 3.0), 9.0, 1e-7);
}

TEST(PsiDelta, ZeroAtOrigin) {
  for (double d : {1e-3, 0.1, 0.9}) EXPECT_EQ(psi_delta(pair_with(2.0, 0.2, d), 0.0), 0.0);
}

TEST(PsiDelta, MatchesSimpsonOracle) {
  const EntropyPair e = pair_with(2.0, 0.2, 0.5);
  EXPECT_NEAR(psi_delta(e, 1.0), oracle::psi_reference(e, 1.0), 1e-9);
}

TEST(PsiDelta, FrozenValue) {
  // p = 2, q = 0.2, delta = 0.5 at s = 1; 30-digit quadrature.
  EXPECT_NEAR(psi_delta(pair_with(2.0, 0.2, 0.5), 1.0), 0.68808662319037934, 1e-13);
}

TEST(PsiDelta, NegativeArgumentRejected) {
  EXPECT_THROW(psi_delta(pair_with(2.0, 0.2, 0.1), -1.0), DomainError);
}

TEST(PsiDelta, BoundedMonotoneInSAndDelta) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> us(0.0, 50.0), ud(1e-3, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double s1 = us(rng), s2 = us(rng), d1 = ud(rng), d2 = ud(rng);
    const EntropyPair a = pair_with(2.0, 0.2, std::min(d1, d2));
    const EntropyPair b = pair_with(2.0, 0.2, std::max(d1, d2));
    const double lo = std::min(s1, s2), hi = std::max(s1, s2);
    EXPECT_LE(psi_delta(a, hi), hi * hi * (1.0 + 1e-12));
    EXPECT_LE(psi_delta(a, lo), psi_delta(a, hi) * (1.0 + 1e-12) + 1e-300);
    EXPECT_GE(psi_delta(a, hi) * (1.0 + 1e-12), psi_delta(b, hi));
  }
}

TEST(PsiDelta, BatchAgreesWithPointwise) {
  const EntropyPair e = select_parameters(3.0, 1.0, 0.1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  std::vector<double> s(512);
  for (double& v : s) v = u(rng);
  s[3] = 0.0;
  s[10] = s[11];                   // duplicate
  s[20] = s[21] * (1.0 + 1e-15);   // nearly equal
  std::vector<double> out(s.size());
  psi_delta_batch(e, s, out);
  for (std::size_t i = 0; i < s.size(); ++i)
    EXPECT_NEAR(out[i], psi_delta(e, s[i]), 1e-12 * psi_delta(e, s[i]) + 1e-300) << "s=" << s[i];
}

TEST(PsiDerivatives, ClosedFormValue) {
  EXPECT_NEAR(psi_derivatives(pair_with(2.0, 0.2, 1.0), 1.0).d1, 1.0, 1e-15);
}

TEST(PsiDerivatives, ConsistentWithFiniteDifferences) {
  const EntropyPair e = pair_with(2.0, 0.2, 0.1);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 50.0);
  for (int i = 0; i < 100; ++i) {
    const double s = u(rng), h = 1e-4 * s;
    const double fd1 = (psi_delta(e, s + h) - psi_delta(e, s - h)) / (2.0 * h);
    const auto d = psi_derivatives(e, s);
    EXPECT_NEAR(fd1, d.d1, 1e-6 * std::abs(d.d1));
    const double fd2 =
        (psi_derivatives(e, s + h).d1 - psi_derivatives(e, s - h).d1) / (2.0 * h);
    EXPECT_NEAR(fd2, d.d2, 1e-6 * std::abs(d.d2));
  }
}

TEST(PsiDerivatives, RejectsNonPositive) {
  EXPECT_THROW(psi_derivatives(pair_with(2.0, 0.2, 0.1), 0.0), DomainError);
}

TEST(Rho, ValuesAtUnitDistance) {
  EntropyPair e;
  e.eta = 0.5;
  e.theta = 0.5;
  const auto r = rho_eval(e, 0.0);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_DOUBLE_EQ(r.d1, 0.5);
  EXPECT_DOUBLE_EQ(r.d2, 0.75);
}

TEST(Rho, DivergesMonotonicallyAndRejectsSingularity) {
  const EntropyPair e = select_parameters(2.0, 1.0);
  double prev = 0.0;
  for (double frac : {0.0, 0.5, 0.9, 0.99, 0.999999}) {
    const double v = rho_eval(e, frac * 2.0 * e.eta).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(rho_eval(e, 2.0 * e.eta), DomainError);
  EXPECT_THROW(rho_eval(e, -1e-3), DomainError);
}

TEST(Rho, Convex) {
  const EntropyPair e = select_parameters(2.0, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, e.eta);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    EXPECT_LE(rho_eval(e, 0.5 * (a + b)).value,
              0.5 * (rho_eval(e, a).value + rho_eval(e, b).value) * (1.0 + 1e-15));
  }
}

TEST(SelectParameters, PEqualsTwo) {
  const EntropyPair e = select_parameters(2.0, 1.0);
  EXPECT_NEAR(e.theta, 1.0 / 9.0, 1e-16);
  EXPECT_NEAR(e.eta, std::sqrt((1.0 / 9.0) * (10.0 / 9.0) / 8.0), 1e-16);
  EXPECT_NEAR(e.eta, 0.124226, 5e-7);
  EXPECT_NEAR(e.q, 0.2, 1e-15);
  EXPECT_NEAR(select_parameters(2.0, 2.0).eta, 0.5 * e.eta, 1e-16);
}

TEST(SelectParameters, PEqualsThree) {
  const EntropyPair e = select_parameters(3.0, 1.0);
  EXPECT_NEAR(e.theta, 1.0 / 14.0, 1e-16);
  EXPECT_NEAR(e.eta, std::sqrt((1.0 / 14.0) * (15.0 / 14.0) / 24.0), 1e-16);
  EXPECT_NEAR(e.eta, 0.05647, 5e-6);
}

TEST(Admissibility, SelectedPairsPass) {
  for (double delta : {1e-3, 0.1, 0.9}) {
    const EntropyPair e = select_parameters(2.0, 1.0, delta);
    const auto g = default_admissibility_grid(e);
    const auto rep = check_admissibility(e, g.s, g.sigma);
    EXPECT_TRUE(rep.pass) << "delta " << delta << " max ratio " << rep.max_ratio;
    EXPECT_EQ(rep.ratio_field.size(), g.s.size() * g.sigma.size());
  }
}

TEST(Admissibility, InflatedEtaFails) {
  EntropyPair e = select_parameters(2.0, 1.0, 0.1);
  e.eta *= 10.0;
  const auto g = default_admissibility_grid(e);
  EXPECT_FALSE(check_admissibility(e, g.s, g.sigma).pass);
}

TEST(Admissibility, SmallSRow) {
  const EntropyPair e = select_parameters(2.0, 1.0, 0.1);
  const std::vector<double> s{1e-8};
  const auto sigma = linspace(0.0, e.eta, 200);
  const auto rep = check_admissibility(e, s, sigma);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.max_ratio, 1.0);
}

TEST(GrowthBounds, RatioAndCurvature) {
  const EntropyPair e = select_parameters(2.0, 1.0, 0.1);
  const auto rep = check_lemma62_bounds(e, linspace(0.01, 1e4, 2000));
  EXPECT_DOUBLE_EQ(rep.ratio_bound, 2.5);
  EXPECT_DOUBLE_EQ(rep.curvature_bound, 2.0);
  EXPECT_TRUE(rep.ratio_ok) << rep.max_ratio;
  EXPECT_TRUE(rep.curvature_ok) << rep.max_curvature;
}

TEST(GrowthBounds, CurvatureIsTwoAtVanishingDelta) {
  const EntropyPair e = pair_with(2.0, 0.2, 1e-12);
  for (double s : {0.5, 2.0, 10.0}) {
    const double c = s * s * psi_derivatives(e, s).d2 / psi_delta(e, s);
    EXPECT_NEAR(c, 2.0, 1e-9);
  }
}

TEST(GrowthBounds, AsymptoteAtLargeS) {
  // s^(q+2-p) psi'' at s = 1e4 against p (p - q - 1) / delta = 3.2.
  const EntropyPair e = pair_with(2.0, 0.2, 0.5);
  const auto rep = check_lemma62_bounds(e, linspace(1.0, 1e4, 1000));
  EXPECT_DOUBLE_EQ(rep.asymptote, 3.2);
  EXPECT_TRUE(rep.asymptote_ok) << "observed " << rep.asymptote_observed << ", rel error "
                                << rep.asymptote_rel_error;
}

TEST(EntropyPair, ValidateRejectsBadParameters) {
  EntropyPair e = select_parameters(2.0, 1.0);
  e.q = 1.5;
  EXPECT_THROW(e.validate(), DomainError);
  e = select_parameters(2.0, 1.0);
  e.delta = 0.0;
  EXPECT_THROW(e.validate(), DomainError);
  EXPECT_NO_THROW(select_parameters(2.0, 1.0).validate());
}
