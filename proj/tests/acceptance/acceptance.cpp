// Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
//
// Usage: ctns_acceptance [prototype.ini]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ctns/entropy.hpp"
#include "ctns/error.hpp"
#include "ctns/io.hpp"
#include "ctns/oracle.hpp"
#include "ctns/sim.hpp"

using namespace ctns;

namespace {

int failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  [%2d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs one criterion; an escaping exception counts as a failure of it.
template <class Fn>
void guard(int id, const char* name, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Positivity over every run, checked at the end.
struct Positivity {
  double min_n = INFINITY, min_c = INFINITY;
  int runs = 0;
  int hard_failures = 0;
  void add(const RunResult& r) {
    min_n = std::min(min_n, r.summary.min_n);
    min_c = std::min(min_c, r.summary.min_c);
    ++runs;
    if (r.hard_failure) ++hard_failures;
  }
} positivity;

RunResult run_logged(const char* label, const SimConfig& c, const RunOptions& opts = {}) {
  std::printf("  running %s ...\n", label);
  std::fflush(stdout);
  RunResult r = run(c, opts);
  std::printf("  %s: %ld steps in %.1fs%s\n", label, r.summary.steps, r.summary.wall_seconds,
              r.hard_failure ? (" (hard failure: " + r.failure + ")").c_str() : "");
  positivity.add(r);
  return r;
}

bool linf_c_nonincreasing(const std::vector<MonitorRecord>& rec, double* worst) {
  *worst = 0.0;
  for (std::size_t i = 1; i < rec.size(); ++i)
    *worst = std::max(*worst, rec[i].f.linf_c - rec[i - 1].f.linf_c);
  return *worst <= 1e-12;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string proto_path = argc > 1 ? argv[1] : CTNS_PROTOTYPE_CONFIG;
  const SimConfig proto = read_config(proto_path);
  const auto start = std::chrono::steady_clock::now();

  // ---- prototype run ----------------------------------------------------------
  std::optional<RunResult> proto_run;
  try {
    proto_run = run_logged("prototype 64x64", proto);
  } catch (const std::exception& e) {
    const std::string why = std::string("prototype run threw: ") + e.what();
    for (int id : {1, 2, 3, 4, 5, 7, 8}) report(id, "prototype-dependent criterion", false, why);
  }
  if (proto_run) {
    const RunResult& P = *proto_run;
    const auto& rec = P.records;
    const auto& sum = P.summary;

    report(1, "mass conservation on the prototype run",
           sum.max_mass_rel_dev <= 1e-12 && sum.wall_seconds <= 300.0,
           fmt("max relative deviation %.3e (<= 1e-12), runtime %.1fs (<= 300s)",
               sum.max_mass_rel_dev, sum.wall_seconds));

    // ---- sup norm of c ------------------------------------------------------------
    guard(2, "sup norm of c nonincreasing", [&] {
      double worst_proto = 0.0;
      const bool proto_ok = linf_c_nonincreasing(rec, &worst_proto);
      double worst_random = 0.0;
      int bad = 0;
      for (int seed = 1; seed <= 20; ++seed) {
        SimConfig c = proto;
        c.grid.nx = c.grid.ny = 32;
        c.fluid.t_end = 0.5;
        c.output.record_every = 20;
        c.initial.n = DensityInit::Random;
        c.initial.c = SignalInit::Random;
        c.initial.u = VelocityInit::Random;
        c.initial.seed = std::uint64_t(seed);
        // Cell-to-cell noise in c makes the chemotactic drift O(1/h).
        c.fluid.dt = 1e-4;
        const RunResult r = run(c);
        positivity.add(r);
        double w = 0.0;
        if (!linf_c_nonincreasing(r.records, &w) || r.hard_failure) ++bad;
        worst_random = std::max(worst_random, w);
      }
      report(2, "sup norm of c nonincreasing", proto_ok && bad == 0,
             fmt("prototype largest increase %.3e; %d of 20 random 32x32 runs fail, largest "
                 "increase %.3e (slack 1e-12)",
                 worst_proto, bad, worst_random));
    });

    // ---- signal Lp inequality ------------------------------------------------------------
    guard(3, "signal Lp inequality residuals", [&] {
      const double tol1 = 1e-6 * sum.lemma31_baseline[0], tol2 = 1e-6 * sum.lemma31_baseline[1];
      const bool resid_ok = sum.lemma31_max[0] <= tol1 && sum.lemma31_max[1] <= tol2;
      // The scheme-quadrature residual sits at round-off, so the dt dependence
      // is measured on the trapezoid-rule residual over a short window.
      SimConfig a = proto;
      a.fluid.t_end = 0.5;
      a.output.record_every = 20;
      SimConfig b = a;
      b.fluid.dt = 0.5 * a.fluid.dt;
      b.output.record_every = 40;
      const RunResult ra = run_logged("dt window", a);
      const RunResult rb = run_logged("dt/2 window", b);
      double ratio = 0.0;
      std::string detail;
      for (int p = 0; p < 2; ++p) {
        const double r = rb.summary.lemma31_trap_max[p] / ra.summary.lemma31_trap_max[p];
        ratio = std::max(ratio, r);
        detail += fmt("; p=%d trapezoid residual %.3e -> %.3e (ratio %.3f)", p + 1,
                      ra.summary.lemma31_trap_max[p], rb.summary.lemma31_trap_max[p], r);
      }
      report(3, "signal Lp inequality residuals", resid_ok && ratio <= 0.7,
             fmt("scheme residual p=1 %.3e (<= %.3e), p=2 %.3e (<= %.3e)", sum.lemma31_max[0], tol1,
                 sum.lemma31_max[1], tol2) +
                 detail + " (ratio <= 0.7)");
    });

    // ---- energy structure -------------------------------------------------------------------
    guard(4, "energy structure", [&] {
      const EnergyFit fine = fit_energy_K(rec);
      SimConfig c = proto;
      c.grid.nx = c.grid.ny = 32;
      const RunResult coarse_run = run_logged("prototype 32x32", c);
      const EnergyFit coarse = fit_energy_K(coarse_run.records);
      const double floor = -P.final.n.grid().volume() / std::numbers::e;
      const double ratio =
          fine.found && coarse.found ? std::max(fine.K / coarse.K, coarse.K / fine.K) : INFINITY;
      const bool ok = fine.found && fine.K <= 1e6 && ratio <= 4.0 && sum.energy_F_min >= floor &&
                      coarse_run.summary.energy_F_min >= floor;
      report(
          4, "energy structure", ok,
          fmt("K(64) = %g, K(32) = %g (<= 1e6, ratio %.3g <= 4); min F %.6g, %.6g (>= %.6g)",
              fine.K, coarse.K, ratio, sum.energy_F_min, coarse_run.summary.energy_F_min, floor));
    });

    report(5, "Navier-Stokes energy inequality", sum.energy1_max <= 1e-8,
           fmt("largest per-step residual / (kinetic + 1) %.3e (<= 1e-8)", sum.energy1_max));
  }

  // ---- entropy machinery ------------------------------------------------------------------
  const EntropyPair pair2 = select_parameters(2.0, 1.0);
  guard(6, "entropy machinery", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const bool select_ok =
        std::abs(pair2.theta - 1.0 / 9.0) <= 1e-15 && std::abs(pair2.eta - 0.124226) <= 5e-7;
    std::string detail = fmt("theta %.12g eta %.8g", pair2.theta, pair2.eta);
    bool adm_ok = true;
    for (double delta : {1e-3, 0.1, 0.9}) {
      const EntropyPair p = select_parameters(2.0, 1.0, delta);
      const auto grid = default_admissibility_grid(p, 200, 200);
      const auto rep = check_admissibility(p, grid.s, grid.sigma);
      adm_ok = adm_ok && rep.pass;
      detail += fmt("; admissibility delta %g max ratio %.4g", delta, rep.max_ratio);
    }
    const auto s = linspace(0.01, 1e4, 2000);
    const auto b = check_lemma62_bounds(pair2, s);
    detail +=
        fmt("; ratio bound %.4g <= %.4g; curvature %.4g <= %.4g; asymptote %.6g vs %.6g "
            "(rel error %.3g, <= 0.05)",
            b.max_ratio, b.ratio_bound, b.max_curvature, b.curvature_bound, b.asymptote_observed,
            b.asymptote, b.asymptote_rel_error);
    const double secs = seconds_since(t0);
    detail += fmt("; %.2fs (<= 30s)", secs);
    report(6, "entropy machinery", select_ok && adm_ok && b.pass && secs <= 30.0, detail);
  });

  // ---- conditional decay and convergence ----------------------------------------------------
  if (proto_run) {
    const auto& rec = proto_run->records;
    const auto t0 = detect_waiting_time(rec, pair2.eta);
    if (!t0) {
      report(7, "entropy decay after the waiting time", false,
             fmt("sup c never reached eta = %.6g", pair2.eta));
      report(8, "convergence to equilibrium", false, "no waiting time");
    } else {
      const auto em = entropy_monitor(rec, *t0, 2.0);
      report(7, "entropy decay after the waiting time", em.pass,
             fmt("T0 = %.4g, %zu records, max lhs/bound %.6g (<= 1)", rec[*t0].f.t, em.checked,
                 em.max_ratio));
      const auto cv = convergence_report(rec, *t0, 0.1);
      report(8, "convergence to equilibrium", cv.all(),
             fmt("c %.3e -> %.3e%s; n-mean %.3e -> %.3e%s; u %.3e -> %.3e%s", cv.c_t0, cv.c_end,
                 cv.c_ok ? "" : " (FAIL)", cv.n_dev_t0, cv.n_dev_end, cv.n_ok ? "" : " (FAIL)",
                 cv.u_t0, cv.u_end, cv.u_ok ? "" : " (FAIL)"));
    }
  }

  // ---- lower bound for int F(phi) ---------------------------------------------------------
  guard(9, "lower bound for int F(phi)", [&] {
    const auto tstart = std::chrono::steady_clock::now();
    const auto r = oracle::run_suite("lemma433");
    const double secs = seconds_since(tstart);
    report(9, "lower bound for int F(phi)", r.pass() && secs <= 10.0,
           r.checks.front().detail + fmt("; %.2fs (<= 10s)", secs));
  });

  // ---- regularization cascade ---------------------------------------------------------------
  guard(10, "regularization cascade", [&] {
    SimConfig c = proto;
    c.grid.nx = c.grid.ny = 32;
    c.fluid.t_end = 1.0;
    std::printf("  running epsilon cascade 32x32 ...\n");
    std::fflush(stdout);
    const auto rep = epsilon_cascade(c, {0.5, 0.1, 0.01, 0.0}, {1.0});
    for (const auto& r : rep.runs) positivity.add(r);
    std::string detail = "L1 distance to eps = 0 at t = 1:";
    for (std::size_t e = 0; e < rep.epsilons.size(); ++e)
      detail += fmt(" eps %g %.4e", rep.epsilons[e], rep.discrepancy[e][0]);
    report(10, "regularization cascade", rep.monotone, detail + " (nonincreasing, 10% slack)");
  });

  // ---- scheme verification -----------------------------------------------------------------
  guard(11, "scheme verification", [&] {
    bool ok = true;
    std::string detail;
    for (const char* suite : {"mms", "tiny-grid"}) {
      const auto r = oracle::run_suite(suite);
      ok = ok && r.pass();
      for (const auto& c : r.checks)
        detail +=
            (detail.empty() ? "" : "; ") + c.name + (c.pass ? "" : " FAIL") + " (" + c.detail + ")";
    }
    report(11, "scheme verification", ok, detail);
  });

  // ---- 3D smoke run ---------------------------------------------------------------------------
  guard(13, "3D 32^3 smoke run", [&] {
    SimConfig c = proto;
    c.grid.dim = 3;
    c.grid.nx = c.grid.ny = c.grid.nz = 32;
    c.fluid.t_end = 0.05;
    c.output.record_every = 20;
    c.initial.n_center = {0.5, 0.7, 0.5};
    const RunResult r = run_logged("3D 32x32x32", c);
    double worst = 0.0;
    const bool mono = linf_c_nonincreasing(r.records, &worst);
    const bool ok = !r.hard_failure && r.final.n.all_finite() && r.final.c.all_finite() &&
                    r.final.u.all_finite() && r.summary.max_mass_rel_dev <= 1e-12 && mono &&
                    r.summary.max_div_u <= 1e-8;
    report(13, "3D 32^3 smoke run", ok,
           fmt("%ld steps in %.1fs; mass deviation %.3e; sup c increase %.3e; max |div u| %.3e; "
               "min n %.3e, min c %.3e",
               r.summary.steps, r.summary.wall_seconds, r.summary.max_mass_rel_dev, worst,
               r.summary.max_div_u, r.summary.min_n, r.summary.min_c));
  });

  report(12, "positivity across all runs",
         positivity.min_n >= 0.0 && positivity.min_c >= 0.0 && positivity.hard_failures == 0,
         fmt("%d runs, min n %.3e, min c %.3e, %d hard monitor failures", positivity.runs,
             positivity.min_n, positivity.min_c, positivity.hard_failures));

  std::printf("%d criteria failed; total %.1fs\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
