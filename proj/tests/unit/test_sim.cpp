#include <gtest/gtest.h>

#include <cmath>

#include "ctns/error.hpp"
#include "ctns/sim.hpp"

using namespace ctns;

namespace {

SimConfig small_config(int m, double t_end) {
  SimConfig c;
  c.grid.nx = c.grid.ny = m;
  c.fluid.t_end = t_end;
  c.fluid.dt = 1e-3;
  c.output.record_every = 10;
  c.initial.u = VelocityInit::VortexPair;
  return c;
}

SimConfig equilibrium_config() {
  SimConfig c = small_config(16, 0.1);
  c.initial.n = DensityInit::Uniform;
  c.initial.n_value = 1.3;
  c.initial.c = SignalInit::Uniform;
  c.initial.c_value = 0.0;
  c.initial.u = VelocityInit::Zero;
  return c;
}

std::vector<MonitorRecord> records_with_energy(const std::vector<double>& F, double D) {
  std::vector<MonitorRecord> out;
  for (std::size_t i = 0; i < F.size(); ++i) {
    MonitorRecord r;
    r.f.t = 0.1 * double(i);
    r.f.energy_F = F[i];
    r.f.dissipation = D;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Run, EquilibriumIsStationary) {
  const SimConfig c = equilibrium_config();
  const RunResult r = run(c);
  ASSERT_EQ(r.summary.steps, 100);
  for (std::size_t i = 0; i < r.final.n.size(); ++i) {
    EXPECT_NEAR(r.final.n[i], 1.3, 1e-12);
    EXPECT_NEAR(r.final.c[i], 0.0, 1e-12);
  }
  EXPECT_LE(linf_norm(r.final.u), 1e-12);
  EXPECT_FALSE(r.hard_failure);
}

TEST(Run, ShortPrototypeHoldsHardMonitors) {
  const RunResult r = run(small_config(24, 0.2));
  EXPECT_FALSE(r.hard_failure) << r.failure;
  EXPECT_LE(r.summary.max_mass_rel_dev, 1e-12);
  EXPECT_GE(r.summary.min_n, 0.0);
  EXPECT_GE(r.summary.min_c, 0.0);
  EXPECT_TRUE(r.summary.linf_c_monotone);
  EXPECT_LE(r.summary.energy1_max, 1e-8);
  EXPECT_LE(r.summary.lemma31_max[0], 1e-6 * r.summary.lemma31_baseline[0]);
  EXPECT_LE(r.summary.lemma31_max[1], 1e-6 * r.summary.lemma31_baseline[1]);
  EXPECT_EQ(r.records.size(), 21u);
  EXPECT_EQ(r.events.named("run_complete").size(), 1u);
}

TEST(Run, ResumesFromState) {
  const SimConfig c = small_config(16, 0.05);
  const RunResult a = run(c);
  SimConfig c2 = c;
  c2.fluid.t_end = 0.1;
  const RunResult b = run_from(c2, a.final);
  EXPECT_EQ(b.summary.steps, 50);
  EXPECT_NEAR(b.final.t, 0.1, 1e-15);
}

TEST(Run, CapturesRequestedTimes) {
  RunOptions opts;
  opts.capture_times = {0.02, 0.05};
  int calls = 0;
  opts.on_record = [&](const State&, const MonitorRecord&) { ++calls; };
  const RunResult r = run(small_config(16, 0.05), opts);
  ASSERT_EQ(r.captures.size(), 2u);
  EXPECT_NEAR(r.captures[0].t, 0.02, 1e-12);
  EXPECT_EQ(calls, int(r.records.size()));
}

TEST(Run, ThreeDimensionalSmoke) {
  SimConfig c = small_config(8, 0.02);
  c.grid.dim = 3;
  c.grid.nz = 8;
  const RunResult r = run(c);
  EXPECT_FALSE(r.hard_failure) << r.failure;
  EXPECT_LE(r.summary.max_mass_rel_dev, 1e-12);
  EXPECT_LE(r.summary.max_div_u, 1e-8);
}

TEST(InitialState, VelocityIsSolenoidal) {
  SimConfig c = small_config(16, 0.1);
  c.initial.u = VelocityInit::Random;
  const State s = initial_state(c);
  EXPECT_LE(max_abs_divergence(s.u), 1e-10);
  EXPECT_GT(linf_norm(s.u), 0.0);
  EXPECT_LE(max_abs_divergence(vortex_pair(Grid::make(16, 16), 0.5)), 1e-12);
}

TEST(FitEnergyK, StationaryGivesOne) {
  const EnergyFit f = fit_energy_K(records_with_energy(std::vector<double>(12, 0.3), 0.0));
  EXPECT_TRUE(f.found);
  EXPECT_EQ(f.K, 1.0);
  EXPECT_EQ(f.exponent, 0);
}

TEST(FitEnergyK, SpikeIsFlagged) {
  std::vector<double> F(12, 0.3);
  F[6] = 1e30;
  const EnergyFit f = fit_energy_K(records_with_energy(F, 0.0));
  EXPECT_FALSE(f.found);
  EXPECT_GT(f.K_required, std::ldexp(1.0, 40));
}

TEST(FitEnergyK, NeedsTenRecords) {
  EXPECT_THROW(fit_energy_K(records_with_energy(std::vector<double>(9, 0.0), 0.0)), DomainError);
}

TEST(FitEnergyK, DissipationSetsScale) {
  // Flat energy with D = 100 needs K^2 >= 100.
  const EnergyFit f = fit_energy_K(records_with_energy(std::vector<double>(12, 0.0), 100.0));
  EXPECT_TRUE(f.found);
  EXPECT_EQ(f.K, 16.0);
  EXPECT_NEAR(f.K_required, 10.0, 1e-12);
}

TEST(WaitingTime, ImmediateAndNever) {
  std::vector<MonitorRecord> rec(5);
  for (auto& r : rec) r.f.linf_c = 0.05;
  EXPECT_EQ(detect_waiting_time(rec, 0.1), 0u);
  for (auto& r : rec) r.f.linf_c = 0.0;
  EXPECT_EQ(detect_waiting_time(rec, 0.1), 0u);
  for (auto& r : rec) r.f.linf_c = 1.0;
  EXPECT_FALSE(detect_waiting_time(rec, 0.1).has_value());
}

TEST(EntropyMonitor, FrozenDensityIsHalfTheBound) {
  std::vector<MonitorRecord> rec(6);
  for (auto& r : rec) r.int_n2 = r.int_n3 = 2.0;
  for (double p : {2.0, 3.0}) {
    const auto m = entropy_monitor(rec, 1, p);
    EXPECT_TRUE(m.pass);
    EXPECT_NEAR(m.max_ratio, 0.5, 1e-8);
    EXPECT_EQ(m.checked, 5u);
  }
  EXPECT_THROW(entropy_monitor(rec, 1, 2.5), DomainError);
  EXPECT_THROW(entropy_monitor(rec, 6, 2.0), DomainError);
}

TEST(EntropyMonitor, AccumulatedDissipationCounts) {
  std::vector<MonitorRecord> rec(3);
  for (auto& r : rec) r.int_n2 = 1.0;
  rec[2].ndiss_p2 = 1.5;  // lhs = 1 + 1.5 > 2
  EXPECT_FALSE(entropy_monitor(rec, 0, 2.0).pass);
}

TEST(Convergence, EquilibriumPassesTrivially) {
  // Dyadic density and no forcing keep every deviation exactly zero.
  SimConfig c = equilibrium_config();
  c.initial.n_value = 1.25;
  c.coefficients.phi_g = 0.0;
  const RunResult r = run(c);
  const auto rep = convergence_report(r.records, 0, 0.1);
  EXPECT_TRUE(rep.all());
}

TEST(Corollary, EquilibriumWithinBounds) {
  const RunResult r = run(small_config(16, 0.1));
  const auto rep = corollary34_check(r.records, 0, 1e-12);
  EXPECT_TRUE(rep.consumed_ok);
  EXPECT_TRUE(rep.grad_c_ok);
  EXPECT_GT(rep.consumed, 0.0);
}

TEST(Cascade, IdenticalEpsilonsAgree) {
  const SimConfig c = small_config(12, 0.05);
  const auto rep = epsilon_cascade(c, {0.0, 0.0}, {0.05});
  ASSERT_EQ(rep.discrepancy.size(), 2u);
  EXPECT_EQ(rep.discrepancy[0][0], 0.0);
  EXPECT_EQ(rep.discrepancy[1][0], 0.0);
  EXPECT_TRUE(rep.monotone);
}

TEST(Cascade, NeedsTwoEpsilons) {
  EXPECT_THROW(epsilon_cascade(small_config(8, 0.01), {0.1}, {0.01}), DomainError);
  EXPECT_THROW(epsilon_cascade(small_config(8, 0.01), {0.1, 0.0}, {0.5}), DomainError);
}

TEST(Cascade, DiscrepancyShrinksWithEpsilon) {
  const auto rep = epsilon_cascade(small_config(16, 0.2), {0.5, 0.1, 0.01, 0.0}, {0.2});
  EXPECT_TRUE(rep.monotone);
  EXPECT_GT(rep.discrepancy[0][0], rep.discrepancy[2][0]);
  EXPECT_EQ(rep.discrepancy[3][0], 0.0);
}

TEST(EventLog, TextFormat) {
  EventLog log;
  log.add(0.5, "waiting_time_p2", 0.124);
  EXPECT_EQ(log.to_text(), "t=0.5 event=waiting_time_p2 value=0.124\n");
}

TEST(Config, ValidateRejectsBadValues) {
  SimConfig c = small_config(8, 0.1);
  c.fluid.dt = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config(8, 0.1);
  c.grid.nx = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(small_config(8, 0.1).step_count(), 100);
}
