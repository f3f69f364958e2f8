// ctns: run simulations and checks from the command line.
//
// Exit status: 0 success, 1 a hard monitor or check failed (or the run
// aborted), 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ctns/coefficients.hpp"
#include "ctns/entropy.hpp"
#include "ctns/error.hpp"
#include "ctns/io.hpp"
#include "ctns/oracle.hpp"
#include "ctns/sim.hpp"

namespace fs = std::filesystem;
using namespace ctns;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SimConfig load(const std::string& path) {
  try {
    return read_config(path);
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void write_run(const fs::path& dir, const std::string& prefix, const SimConfig& config,
               const RunResult& r) {
  atomic_write(dir / (prefix + "monitors.csv"), format_csv(r.records));
  atomic_write(dir / (prefix + "events.log"), r.events.to_text());
  write_snapshot(dir / (prefix + "final.ctns"), r.final);
  atomic_write(dir / (prefix + "config.ini"), serialize_config(config));
}

void print_summary(const RunResult& r) {
  const auto& s = r.summary;
  std::printf("steps %ld  wall %.2fs  records %zu\n", s.steps, s.wall_seconds, r.records.size());
  std::printf("max relative mass deviation  %.3e\n", s.max_mass_rel_dev);
  std::printf("min n %.3e  min c %.3e\n", s.min_n, s.min_c);
  std::printf("sup c nonincreasing          %s (largest increase %.3e)\n",
              s.linf_c_monotone ? "yes" : "no", s.max_linf_c_increase);
  std::printf("signal residuals p=1,2       %.3e %.3e (baselines %.6g %.6g)\n", s.lemma31_max[0],
              s.lemma31_max[1], s.lemma31_baseline[0], s.lemma31_baseline[1]);
  std::printf("NS energy residual           %.3e\n", s.energy1_max);
  std::printf("min energy                   %.6g\n", s.energy_F_min);
  std::printf("max |div u|                  %.3e\n", s.max_div_u);
  for (const auto& e : r.events.events())
    if (e.name.rfind("waiting_time", 0) == 0)
      std::printf("%s at t = %.6g\n", e.name.c_str(), e.t);
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
  const SimConfig config = load(config_path);
  const fs::path dir(out);
  fs::create_directories(dir);
  RunResult r;
  try {
    r = run(config);
  } catch (const Error& e) {
    std::fprintf(stderr, "run aborted: %s\n", e.what());
    return kFailed;
  }
  write_run(dir, "", config, r);
  print_summary(r);
  if (r.hard_failure) {
    std::fprintf(stderr, "hard monitor failure: %s\n", r.failure.c_str());
    return kFailed;
  }
  return kOk;
}

int cmd_cascade(const std::string& config_path, const std::string& out,
                std::vector<double> checkpoints) {
  const SimConfig config = load(config_path);
  if (config.coefficients.epsilon.size() < 2)
    throw UsageError("cascade needs coefficients.epsilon with at least two values");
  if (checkpoints.empty()) checkpoints = {config.fluid.t_end};
  const fs::path dir(out);
  fs::create_directories(dir);
  CascadeReport rep;
  try {
    rep = epsilon_cascade(config, config.coefficients.epsilon, checkpoints);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  } catch (const Error& e) {
    std::fprintf(stderr, "cascade aborted: %s\n", e.what());
    return kFailed;
  }
  std::ostringstream csv;
  csv << "epsilon,t,l1_discrepancy\n";
  bool hard = false;
  for (std::size_t e = 0; e < rep.epsilons.size(); ++e) {
    for (std::size_t k = 0; k < rep.checkpoints.size(); ++k)
      csv << g17(rep.epsilons[e]) << ',' << g17(rep.checkpoints[k]) << ','
          << g17(rep.discrepancy[e][k]) << '\n';
    SimConfig c = config;
    c.coefficients.epsilon = {rep.epsilons[e]};
    c.fluid.epsilon.reset();
    write_run(dir, "eps" + g17(rep.epsilons[e]) + "_", c, rep.runs[e]);
    hard = hard || rep.runs[e].hard_failure;
    std::printf("eps %-8g", rep.epsilons[e]);
    for (double d : rep.discrepancy[e]) std::printf("  %.6e", d);
    std::printf("\n");
  }
  atomic_write(dir / "cascade.csv", csv.str());
  std::printf("discrepancy nonincreasing as eps decreases: %s\n", rep.monotone ? "yes" : "no");
  return hard ? kFailed : kOk;
}

int cmd_check_entropy(double p, double chi1, double delta) {
  EntropyPair pair;
  try {
    pair = select_parameters(p, chi1, delta);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  std::printf("p=%g q=%g delta=%g\n", pair.p, pair.q, pair.delta);
  std::printf("theta=%.6f, eta=%.6f\n", pair.theta, pair.eta);
  std::printf("theta condition %.6g (<= 1)  eta condition %.6g (<= 1)\n", pair.theta_condition(),
              pair.eta_condition());
  const auto grid = default_admissibility_grid(pair);
  const auto adm = check_admissibility(pair, grid.s, grid.sigma);
  std::printf("admissibility %s (max ratio %.6g at s=%.4g, sigma=%.4g)\n",
              adm.pass ? "PASS" : "FAIL", adm.max_ratio, adm.argmax_s, adm.argmax_sigma);
  const auto s = linspace(0.01, 1e4, 2000);
  const auto b = check_lemma62_bounds(pair, s);
  std::printf("psi'^2/(psi psi'') <= %.6g: %s (max %.6g)\n", b.ratio_bound,
              b.ratio_ok ? "PASS" : "FAIL", b.max_ratio);
  std::printf("s^2 psi''/psi <= %.6g: %s (max %.6g)\n", b.curvature_bound,
              b.curvature_ok ? "PASS" : "FAIL", b.max_curvature);
  std::printf("s^(q+2-p) psi'' -> %.6g: %s (%.6g at s=1e4, rel error %.3g)\n", b.asymptote,
              b.asymptote_ok ? "PASS" : "FAIL", b.asymptote_observed, b.asymptote_rel_error);
  return adm.pass ? kOk : kFailed;
}

int cmd_check_coeffs(const std::string& config_path) {
  const SimConfig config = load(config_path);
  const auto& spec = config.coefficients;
  const Sensitivity chi = spec.sensitivity();
  const Consumption f = spec.consumption();
  bool ok = true;
  const auto unit = linspace(0.0, 1.0, 1001);
  for (double eps : spec.epsilon) {
    const auto rep = check_F_conditions(RegularizedF{eps}, unit);
    std::printf("F_eps conditions, eps=%g: %s\n", eps, rep.pass ? "PASS" : "FAIL");
    for (const auto& v : rep.violations) std::printf("  %s\n", v.c_str());
    ok = ok && rep.pass;
  }
  const auto samples = linspace(spec.s_max / 1000.0, spec.s_max, 1000);
  const auto st = check_structural(chi, f, samples);
  std::printf("structural conditions on (0, %g]: %s\n", spec.s_max, st.pass ? "PASS" : "FAIL");
  for (const auto& v : st.violations) std::printf("  %s\n", v.c_str());
  ok = ok && st.pass;
  const double lower = chi_over_f_lower(chi, f, spec.s_max);
  std::printf("inf f(s)/(s chi(s)) on (0, %g]: %.6g\n", spec.s_max, lower);
  std::printf("chi1 = sup chi on (0,1): %.6g\n", chi.sup(0.0, 1.0));
  return ok ? kOk : kFailed;
}

int cmd_verify(const std::string& suite) {
  if (!oracle::has_suite(suite)) {
    std::string names;
    for (const auto& n : oracle::suite_names()) names += " " + n;
    throw UsageError("unknown suite '" + suite + "'; available:" + names);
  }
  const auto r = oracle::run_suite(suite);
  for (const auto& c : r.checks)
    std::printf("%s  %s  (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  return r.pass() ? kOk : kFailed;
}

int cmd_mms(int refinements, const std::string& which) {
  if (refinements < 3) throw UsageError("--refinements must be at least 3");
  std::vector<oracle::MmsOperator> ops;
  for (auto op : {oracle::MmsOperator::HeatNeumann, oracle::MmsOperator::AdvDiff,
                  oracle::MmsOperator::StokesDiffusion})
    if (which == "all" || which == oracle::to_string(op)) ops.push_back(op);
  if (ops.empty()) throw UsageError("unknown operator '" + which + "'");
  bool ok = true;
  for (auto op : ops) {
    const auto r = oracle::mms_convergence(op, refinements);
    std::printf("%s\n", oracle::to_string(op).c_str());
    for (std::size_t i = 0; i < r.spatial_errors.size(); ++i)
      std::printf("  N=%-5d error %.6e%s\n", r.resolutions[i], r.spatial_errors[i],
                  i ? ("  order " + std::to_string(r.spatial_orders[i - 1])).c_str() : "");
    for (std::size_t i = 0; i < r.temporal_errors.size(); ++i)
      std::printf("  dt=%-10.3e error %.6e%s\n", r.time_steps[i], r.temporal_errors[i],
                  i ? ("  order " + std::to_string(r.temporal_orders[i - 1])).c_str() : "");
    std::printf("  %s\n", r.pass ? "PASS" : "FAIL");
    ok = ok && r.pass;
  }
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chemotaxis-Navier-Stokes simulator and checks"};
  app.require_subcommand(1);

  std::string config, out, suite, op = "all";
  std::vector<double> checkpoints;
  double p = 2.0, chi1 = 1.0, delta = 0.1;
  int refinements = 3;

  auto* sim = app.add_subcommand("simulate", "Run one simulation");
  sim->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory")->required();

  auto* cas = app.add_subcommand("cascade", "Run the configuration for every epsilon");
  cas->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  cas->add_option("--out", out, "Output directory")->required();
  cas->add_option("--checkpoints", checkpoints, "Comparison times (default t_end)")
      ->delimiter(',');

  auto* ent = app.add_subcommand("check-entropy", "Select and check an entropy pair");
  ent->add_option("--p", p, "Exponent")->capture_default_str();
  ent->add_option("--chi1", chi1, "sup of chi on (0,1)")->capture_default_str();
  ent->add_option("--delta", delta, "Regularization of psi")->capture_default_str();

  auto* coef = app.add_subcommand("check-coeffs", "Check coefficient hypotheses");
  coef->add_option("--config", config, "Configuration file")->required()->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "Run a named verification suite");
  ver->add_option("--suite", suite, "Suite name")->required();

  auto* mms = app.add_subcommand("mms", "Manufactured-solution refinement study");
  mms->add_option("--refinements", refinements, "Number of levels (>= 3)")->capture_default_str();
  mms->add_option("--operator", op, "heat_neumann | advdiff | stokes_diffusion | all")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sim) return cmd_simulate(config, out);
    if (*cas) return cmd_cascade(config, out, checkpoints);
    if (*ent) return cmd_check_entropy(p, chi1, delta);
    if (*coef) return cmd_check_coeffs(config);
    if (*ver) return cmd_verify(suite);
    if (*mms) return cmd_mms(refinements, op);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
  return kUsage;
}
