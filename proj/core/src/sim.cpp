#include "ctns/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "ctns/error.hpp"
#include "ctns/io.hpp"

namespace ctns {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

ScalarField read_cell_values(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("coefficients.phi_file: cannot open '" + path + "'");
  std::vector<double> values{std::istream_iterator<double>(in), std::istream_iterator<double>()};
  if (!in.eof()) throw ConfigError("coefficients.phi_file: non-numeric entry in '" + path + "'");
  if (values.size() != grid.cell_count())
    throw ConfigError("coefficients.phi_file: expected " + std::to_string(grid.cell_count()) +
                      " values, found " + std::to_string(values.size()));
  ScalarField f(grid);
  std::copy(values.begin(), values.end(), f.values().begin());
  return f;
}

}  // namespace

// ---- configuration -----------------------------------------------------------

Grid GridSpec::make() const {
  if (dim == 2) return Grid::make(nx, ny, lx, ly);
  return Grid::make(nx, ny, nz, lx, ly, lz);
}

Sensitivity CoefficientSpec::sensitivity() const {
  if (chi == "constant") return Sensitivity::constant(chi_value);
  return Sensitivity::tabulated(chi_points, chi_values);
}

Consumption CoefficientSpec::consumption() const {
  if (f == "linear") return Consumption::linear();
  return Consumption::tabulated(f_points, f_values);
}

Potential CoefficientSpec::potential(const Grid& grid) const {
  if (phi == "linear_gravity") return Potential::linear_gravity(phi_direction, phi_g);
  return Potential::gridded(read_cell_values(phi_file, grid));
}

void SimConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
  };
  if (grid.dim != 2 && grid.dim != 3) bad("grid.dim", "must be 2 or 3");
  if (grid.nx < 1) bad("grid.nx", "must be >= 1");
  if (grid.ny < 1) bad("grid.ny", "must be >= 1");
  if (grid.dim == 3 && grid.nz < 1) bad("grid.nz", "must be >= 1");
  if (grid.dim == 2 && grid.nz != 1) bad("grid.nz", "must be 1 in 2D");
  if (!(grid.lx > 0.0)) bad("grid.lx", "must be positive");
  if (!(grid.ly > 0.0)) bad("grid.ly", "must be positive");
  if (!(grid.lz > 0.0)) bad("grid.lz", "must be positive");

  if (coefficients.chi != "constant" && coefficients.chi != "tabulated")
    bad("coefficients.chi", "expected a number or 'tabulated'");
  if (coefficients.chi == "constant" && !(coefficients.chi_value > 0.0))
    bad("coefficients.chi", "must be positive");
  if (coefficients.chi == "tabulated" &&
      (coefficients.chi_points.size() < 3 ||
       coefficients.chi_points.size() != coefficients.chi_values.size()))
    bad("coefficients.chi_points", "need >= 3 points matching chi_values");
  if (coefficients.f != "linear" && coefficients.f != "tabulated")
    bad("coefficients.f", "expected 'linear' or 'tabulated'");
  if (coefficients.f == "tabulated" &&
      (coefficients.f_points.size() < 3 ||
       coefficients.f_points.size() != coefficients.f_values.size()))
    bad("coefficients.f_points", "need >= 3 points matching f_values");
  if (coefficients.phi != "linear_gravity" && coefficients.phi != "gridded")
    bad("coefficients.phi", "expected 'linear_gravity' or 'gridded'");
  if (coefficients.phi == "linear_gravity" && !(coefficients.phi_g >= 0.0))
    bad("coefficients.phi_g", "must be >= 0");
  if (coefficients.phi == "gridded" && coefficients.phi_file.empty())
    bad("coefficients.phi_file", "required for gridded potential");
  if (coefficients.epsilon.empty()) bad("coefficients.epsilon", "needs at least one value");
  for (double e : coefficients.epsilon)
    if (!(e >= 0.0)) bad("coefficients.epsilon", "values must be >= 0");
  if (!(coefficients.s_max > 0.0)) bad("coefficients.s_max", "must be positive");

  if (!(fluid.dt > 0.0)) bad("fluid.dt", "must be positive");
  if (!(fluid.t_end > 0.0)) bad("fluid.t_end", "must be positive");
  if (fluid.epsilon && !(*fluid.epsilon >= 0.0)) bad("fluid.epsilon", "must be >= 0");
  if (!(fluid.cfl_max > 0.0)) bad("fluid.cfl_max", "must be positive");
  if (!(fluid.poisson_tol > 0.0)) bad("fluid.poisson_tol", "must be positive");
  if (fluid.max_iters < 1) bad("fluid.max_iters", "must be >= 1");

  if (!(initial.n_background >= 0.0)) bad("initial.n_background", "must be >= 0");
  if (!(initial.n_amplitude >= 0.0)) bad("initial.n_amplitude", "must be >= 0");
  if (!(initial.n_width > 0.0)) bad("initial.n_width", "must be positive");
  if (!(initial.n_value >= 0.0)) bad("initial.n_value", "must be >= 0");
  if (!(initial.c_value >= 0.0)) bad("initial.c_value", "must be >= 0");
  const bool needs_snapshot = initial.n == DensityInit::Snapshot ||
                              initial.c == SignalInit::Snapshot ||
                              initial.u == VelocityInit::Snapshot;
  if (needs_snapshot && initial.snapshot.empty())
    bad("initial.snapshot", "required by a snapshot preset");

  if (!(monitors.kappa > 0.0)) bad("monitors.kappa", "must be positive");
  if (!(monitors.sigma_n > 0.0)) bad("monitors.sigma_n", "must be positive");
  if (!(monitors.sigma_c > 0.0)) bad("monitors.sigma_c", "must be positive");
  if (!(monitors.tol_c_rel > 0.0)) bad("monitors.tol_c_rel", "must be positive");
  if (!(monitors.tol_energy_rel > 0.0)) bad("monitors.tol_energy_rel", "must be positive");
  if (!(monitors.ratio_tol > 0.0)) bad("monitors.ratio_tol", "must be positive");
  for (double p : monitors.entropy_p)
    if (p != 2.0 && p != 3.0) bad("monitors.entropy_p", "supported values are 2 and 3");
  if (!(monitors.entropy_delta > 0.0 && monitors.entropy_delta < 1.0))
    bad("monitors.entropy_delta", "must lie in (0,1)");
  if (monitors.chi1 && !(*monitors.chi1 > 0.0)) bad("monitors.chi1", "must be positive");
  if (!(monitors.mass_tol > 0.0)) bad("monitors.mass_tol", "must be positive");
  for (const auto& h : monitors.hard)
    if (h != "mass" && h != "positivity" && h != "linf_c" && h != "lemma31" && h != "energy1")
      bad("monitors.hard", "unknown monitor '" + h + "'");

  if (output.record_every < 1) bad("output.record_every", "must be >= 1");
}

long SimConfig::step_count() const {
  return std::max<long>(1, std::lround(fluid.t_end / fluid.dt));
}

Model Model::from_config(const SimConfig& config, const Grid& grid) {
  Model m;
  m.chi = config.coefficients.sensitivity();
  m.f = config.coefficients.consumption();
  m.phi = config.coefficients.potential(grid);
  m.F = RegularizedF{config.epsilon()};
  m.yosida_epsilon = config.yosida_epsilon();
  m.grad_phi = m.phi.face_gradient(grid);
  m.chi1 = config.monitors.chi1.value_or(m.chi.sup(0.0, 1.0));
  return m;
}

// ---- initial data ----------------------------------------------------------------

VectorField vortex_pair(const Grid& g, double amplitude) {
  const int nx = g.n[0], ny = g.n[1];
  std::vector<double> psi(std::size_t(nx + 1) * (ny + 1));
  const double pi = std::numbers::pi;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) {
      const double x = double(i) / nx, y = double(j) / ny;
      const double sx = std::sin(pi * x), sy = std::sin(pi * y);
      psi[std::size_t(i) * (ny + 1) + j] = amplitude * sx * sx * std::sin(2.0 * pi * x) * sy * sy;
    }
  std::vector<double> slab;
  if (g.dim == 3)
    for (int k = 0; k < g.n[2]; ++k) slab.push_back(std::sin(pi * (k + 0.5) / g.n[2]));
  return curl_of_nodal_stream(g, psi, slab);
}

namespace {

VectorField random_velocity(const Grid& g, double amplitude, std::mt19937_64& rng) {
  const int nx = g.n[0], ny = g.n[1];
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> psi(std::size_t(nx + 1) * (ny + 1), 0.0);
  const double h = std::min(g.h[0], g.h[1]);
  for (int i = 1; i < nx; ++i)
    for (int j = 1; j < ny; ++j) psi[std::size_t(i) * (ny + 1) + j] = 0.5 * amplitude * h * u(rng);
  std::vector<double> slab;
  if (g.dim == 3)
    for (int k = 0; k < g.n[2]; ++k) slab.push_back(0.5 * (1.0 + u(rng)));
  return curl_of_nodal_stream(g, psi, slab);
}

}  // namespace

State initial_state(const SimConfig& config) {
  config.validate();
  const Grid g = config.grid.make();
  const InitialSpec& ini = config.initial;
  std::mt19937_64 rng(ini.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::optional<State> snap;
  if (ini.n == DensityInit::Snapshot || ini.c == SignalInit::Snapshot ||
      ini.u == VelocityInit::Snapshot) {
    snap = read_snapshot(ini.snapshot);
    if (snap->n.grid().n != g.n || snap->n.grid().dim != g.dim)
      throw ConfigError("initial.snapshot: grid does not match [grid]");
  }

  State s;
  s.n = ScalarField(g);
  switch (ini.n) {
    case DensityInit::GaussianBump:
      for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
          for (int k = 0; k < g.n[2]; ++k) {
            const auto x = g.cell_center(i, j, k);
            double r2 = 0.0;
            for (int d = 0; d < g.dim; ++d) {
              const double dx = x[d] - ini.n_center[d] * g.length[d];
              r2 += dx * dx;
            }
            s.n(i, j, k) = ini.n_background +
                           ini.n_amplitude * std::exp(-r2 / (2.0 * ini.n_width * ini.n_width));
          }
      break;
    case DensityInit::Uniform:
      for (double& v : s.n.values()) v = ini.n_value;
      break;
    case DensityInit::Random:
      for (double& v : s.n.values()) v = ini.n_value * (0.5 + unif(rng));
      break;
    case DensityInit::Snapshot:
      s.n = ScalarField(g);
      std::copy(snap->n.values().begin(), snap->n.values().end(), s.n.values().begin());
      break;
  }
  if (!(integrate(s.n) > 0.0)) throw ConfigError("initial: n must not vanish identically");

  s.c = ScalarField(g);
  switch (ini.c) {
    case SignalInit::Uniform:
      for (double& v : s.c.values()) v = ini.c_value;
      break;
    case SignalInit::Random:
      for (double& v : s.c.values()) v = ini.c_value * unif(rng);
      break;
    case SignalInit::Snapshot:
      std::copy(snap->c.values().begin(), snap->c.values().end(), s.c.values().begin());
      break;
  }

  VectorField u(g);
  switch (ini.u) {
    case VelocityInit::Zero:
      break;
    case VelocityInit::VortexPair:
      u = vortex_pair(g, ini.u_amplitude);
      break;
    case VelocityInit::Random:
      u = random_velocity(g, ini.u_amplitude, rng);
      break;
    case VelocityInit::Snapshot:
      for (int d = 0; d < g.dim; ++d)
        std::copy(snap->u.component(d).begin(), snap->u.component(d).end(),
                  u.component(d).begin());
      break;
  }
  s.u = helmholtz_project(u, config.fluid.poisson_tol, config.fluid.max_iters).u;
  s.pressure = ScalarField(g);
  s.t = 0.0;
  s.step = 0;
  return s;
}

// ---- events ----------------------------------------------------------------------

void EventLog::add(double t, std::string name, double value) {
  events_.push_back({t, std::move(name), value});
}

std::vector<Event> EventLog::named(const std::string& name) const {
  std::vector<Event> out;
  for (const auto& e : events_)
    if (e.name == name) out.push_back(e);
  return out;
}

std::string EventLog::to_text() const {
  std::string out;
  for (const auto& e : events_)
    out += "t=" + fmt(e.t) + " event=" + e.name + " value=" + fmt(e.value) + "\n";
  return out;
}

// ---- functionals -------------------------------------------------------------------

FunctionalSnapshot evaluate_functionals(const State& s, const Model& model,
                                        const MonitorSpec& monitors, double n_mean,
                                        const EntropyPair& pair2, const EntropyPair& pair3) {
  FunctionalSnapshot f;
  f.t = s.t;
  f.mass = integrate(s.n);
  f.linf_c = linf_norm(s.c);
  f.l1_c = lp_norm(s.c, 1.0);
  f.l2_c = lp_norm(s.c, 2.0);
  f.energy_F = energy_F(s.n, s.c, s.u, model.chi, model.f, monitors.kappa, monitors.sigma_c);
  f.dissipation = dissipation_D(s.n, s.c, s.u, monitors.sigma_n, monitors.sigma_c);
  f.ns_kinetic = kinetic_energy(s.u);
  f.grad_u_sq = vector_grad_sq(s.u);
  f.forcing_work = forcing_work(s.n, s.u, model.grad_phi);
  const double cmax = s.c.max();
  if (cmax < 2.0 * pair2.eta) f.entropy_p2 = entropy_value(pair2, s.n, s.c);
  if (cmax < 2.0 * pair3.eta) f.entropy_p3 = entropy_value(pair3, s.n, s.c);
  double dev = 0.0;
  for (double v : s.n.values()) dev = std::max(dev, std::abs(v - n_mean));
  f.linf_n_dev = dev;
  f.linf_u = linf_norm(s.u);
  return f;
}

// ---- time loop ---------------------------------------------------------------------

RunResult run(const SimConfig& config, const RunOptions& options) {
  return run_from(config, initial_state(config), options);
}

RunResult run_from(const SimConfig& config, State s, const RunOptions& options) {
  config.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const Grid g = s.n.grid();
  const Model model = Model::from_config(config, g);
  const MonitorSpec& mon = config.monitors;
  const EntropyPair pair2 = select_parameters(2.0, model.chi1, mon.entropy_delta);
  const EntropyPair pair3 = select_parameters(3.0, model.chi1, mon.entropy_delta);
  const double dt = config.fluid.dt;
  const long steps = config.step_count();
  const long start_step = s.step;

  FluidStepParams fp;
  fp.dt = dt;
  fp.epsilon_yosida = model.yosida_epsilon;
  fp.poisson_tol = config.fluid.poisson_tol;
  fp.max_iters = config.fluid.max_iters;
  fp.cfl_max = config.fluid.cfl_max;
  TransportStepParams tp;
  tp.dt = dt;
  tp.limiter = config.transport.limiter;
  tp.consumption = config.transport.consumption;
  tp.cfl_max = config.fluid.cfl_max;
  tp.solve = SolveOptions{config.fluid.poisson_tol, config.fluid.max_iters};

  RunResult res;
  MonitorSummary& sum = res.summary;
  const double mass0 = integrate(s.n);
  const double n_mean = mass0 / g.volume();
  Lemma31Tracker tracker(s.c, s.n, model.f, model.F);
  sum.lemma31_baseline[0] = tracker.baseline(1);
  sum.lemma31_baseline[1] = tracker.baseline(2);
  GnAccumulator gn;
  double ndiss2 = 0.0, ndiss3 = 0.0, energy1_since = 0.0;
  sum.min_n = s.n.min();
  sum.min_c = s.c.min();
  sum.energy_F_min = std::numeric_limits<double>::infinity();
  bool t0_seen[2] = {false, false};
  bool reported[4] = {false, false, false, false};
  std::vector<double> captures = options.capture_times;
  std::sort(captures.begin(), captures.end());
  std::size_t next_capture = 0;

  auto hard = [&](const std::string& name) { return contains(mon.hard, name); };
  auto fail = [&](const std::string& name, double value, const std::string& msg) {
    res.events.add(s.t, name, value);
    res.hard_failure = true;
    res.failure = "t=" + fmt(s.t) + ": " + msg;
  };

  auto record = [&]() {
    MonitorRecord r;
    r.f = evaluate_functionals(s, model, mon, n_mean, pair2, pair3);
    r.step = s.step;
    r.lemma31_p1 = tracker.scheme_residual(1);
    r.lemma31_p2 = tracker.scheme_residual(2);
    r.lemma31_trap_p1 = tracker.trapezoid_residual(1);
    r.lemma31_trap_p2 = tracker.trapezoid_residual(2);
    r.energy1_residual = energy1_since;
    energy1_since = 0.0;
    r.int_n2 = power_integral(s.n, 2.0);
    r.int_n3 = power_integral(s.n, 3.0);
    r.ndiss_p2 = ndiss2;
    r.ndiss_p3 = ndiss3;
    r.consumed = tracker.consumed();
    r.grad_c_sq_int = tracker.grad_sq_integral();
    if (auto ratio = gn.ratio()) r.gn_ratio_u = *ratio;
    r.max_div_u = max_abs_divergence(s.u);

    sum.energy_F_min = std::min(sum.energy_F_min, r.f.energy_F);
    sum.max_div_u = std::max(sum.max_div_u, r.max_div_u);
    const double mass_dev = std::abs(r.f.mass - mass0) / mass0;
    sum.max_mass_rel_dev = std::max(sum.max_mass_rel_dev, mass_dev);
    for (int p = 0; p < 2; ++p) {
      const double sres = p == 0 ? r.lemma31_p1 : r.lemma31_p2;
      const double tres = p == 0 ? r.lemma31_trap_p1 : r.lemma31_trap_p2;
      sum.lemma31_max[p] = std::max(sum.lemma31_max[p], sres);
      sum.lemma31_trap_max[p] = std::max(sum.lemma31_trap_max[p], tres);
    }

    if (mass_dev > mon.mass_tol) {
      if (hard("mass"))
        fail("mass_violation", mass_dev, "relative mass deviation " + fmt(mass_dev));
      else if (!reported[0]) {
        res.events.add(s.t, "mass_violation", mass_dev);
        reported[0] = true;
      }
    }
    if (!res.records.empty()) {
      const double inc = r.f.linf_c - res.records.back().f.linf_c;
      sum.max_linf_c_increase = std::max(sum.max_linf_c_increase, inc);
      if (inc > 1e-12) {
        sum.linf_c_monotone = false;
        if (hard("linf_c"))
          fail("linf_c_increase", inc, "sup norm of c increased by " + fmt(inc));
        else if (!reported[1]) {
          res.events.add(s.t, "linf_c_increase", inc);
          reported[1] = true;
        }
      }
    }
    for (int p = 1; p <= 2; ++p) {
      const double resid = tracker.scheme_residual(p);
      const double tol = mon.tol_c_rel * std::max(tracker.baseline(p), 1e-300);
      if (resid > tol) {
        if (hard("lemma31"))
          fail("lemma31_violation", resid, "signal Lp residual " + fmt(resid));
        else if (!reported[1 + p]) {
          res.events.add(s.t, "lemma31_violation_p" + std::to_string(p), resid);
          reported[1 + p] = true;
        }
      }
    }
    const EntropyPair* pairs[2] = {&pair2, &pair3};
    for (int q = 0; q < 2; ++q)
      if (!t0_seen[q] && r.f.linf_c <= pairs[q]->eta) {
        t0_seen[q] = true;
        res.events.add(s.t, "waiting_time_p" + std::to_string(q + 2), pairs[q]->eta);
      }
    res.records.push_back(r);
    if (options.on_record) options.on_record(s, r);
  };

  record();
  bool energy1_reported = false;
  for (long step = start_step + 1; step <= steps && !res.hard_failure; ++step) {
    const std::string context = "step " + std::to_string(step) + ": ";
    ScalarField n1;
    CStepResult cs;
    NsStepResult ns;
    try {
      n1 = n_step(s.n, s.c, s.u, model.chi, model.F, tp);
      cs = c_step(s.c, n1, s.u, model.f, model.F, tp);
      ns = ns_step(s.u, n1, model.grad_phi, fp);
    } catch (const CflError& e) {
      throw e.with_context(context);
    } catch (const SolverError& e) {
      throw e.with_context(context);
    } catch (const DomainError& e) {
      throw DomainError(context + e.what());
    }
    const double kin_prev = kinetic_energy(s.u);
    const double r1 = ns_energy_residual(s.u, ns.u, n1, model.grad_phi, dt) / (kin_prev + 1.0);
    energy1_since = std::max(energy1_since, r1);
    sum.energy1_max = std::max(sum.energy1_max, r1);
    sum.max_projection_iterations = std::max(sum.max_projection_iterations, ns.projection_iterations);

    tracker.add_step(cs, n1, dt);
    ndiss2 += dt * weighted_grad_sq(n1, 2.0);
    ndiss3 += dt * weighted_grad_sq(n1, 3.0);
    gn.add(ns.u, dt);

    s.n = std::move(n1);
    s.c = std::move(cs.c);
    s.u = std::move(ns.u);
    s.pressure = std::move(ns.pressure);
    s.step = step;
    s.t = double(step) * dt;

    const double nmin = s.n.min(), cmin = s.c.min();
    sum.min_n = std::min(sum.min_n, nmin);
    sum.min_c = std::min(sum.min_c, cmin);
    if (!s.n.all_finite() || !s.c.all_finite() || !s.u.all_finite()) {
      fail("nan", double(step), "non-finite values at step " + std::to_string(step));
      break;
    }
    if (nmin < 0.0 || cmin < 0.0) {
      if (hard("positivity"))
        fail("positivity_violation", std::min(nmin, cmin),
             "negative density or signal at step " + std::to_string(step));
      else
        res.events.add(s.t, "positivity_violation", std::min(nmin, cmin));
    }
    if (r1 > mon.tol_energy_rel && !energy1_reported) {
      if (hard("energy1"))
        fail("energy1_violation", r1, "NS energy residual " + fmt(r1));
      else
        res.events.add(s.t, "energy1_violation", r1);
      energy1_reported = true;
    }
    while (next_capture < captures.size() &&
           std::abs(captures[next_capture] - s.t) <= 0.5 * dt) {
      res.captures.push_back(s);
      ++next_capture;
    }
    if (step % config.output.record_every == 0 || step == steps) record();
  }
  sum.steps = s.step - start_step;
  sum.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  if (!res.hard_failure) res.events.add(s.t, "run_complete", double(s.step));
  res.final = std::move(s);
  return res;
}

// ---- post-processing ----------------------------------------------------------------

EnergyFit fit_energy_K(const std::vector<MonitorRecord>& records) {
  if (records.size() < 10)
    throw DomainError("fit_energy_K needs at least 10 records, got " +
                      std::to_string(records.size()));
  EnergyFit fit;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const double dt = records[i + 1].f.t - records[i].f.t;
    if (!(dt > 0.0)) continue;
    const double a = (records[i + 1].f.energy_F - records[i].f.energy_F) / dt;
    const double D = std::max(records[i].f.dissipation, 0.0);
    // K^2 - a K - D >= 0.
    const double need = 0.5 * (a + std::sqrt(a * a + 4.0 * D));
    if (!std::isfinite(need)) {
      fit.K_required = std::numeric_limits<double>::infinity();
      return fit;
    }
    fit.K_required = std::max(fit.K_required, need);
  }
  for (int k = 0; k <= 40; ++k) {
    const double K = std::ldexp(1.0, k);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < records.size() && ok; ++i) {
      const double dt = records[i + 1].f.t - records[i].f.t;
      if (!(dt > 0.0)) continue;
      const double lhs = (records[i + 1].f.energy_F - records[i].f.energy_F) / dt +
                         records[i].f.dissipation / K;
      ok = lhs <= K;
    }
    if (ok) {
      fit.found = true;
      fit.K = K;
      fit.exponent = k;
      return fit;
    }
  }
  return fit;
}

std::optional<std::size_t> detect_waiting_time(const std::vector<MonitorRecord>& records,
                                               double eta) {
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].f.linf_c <= eta) return i;
  return std::nullopt;
}

EntropyMonitorReport entropy_monitor(const std::vector<MonitorRecord>& records,
                                     std::size_t t0_index, double p) {
  if (p != 2.0 && p != 3.0) throw DomainError("entropy_monitor supports p = 2, 3");
  if (t0_index >= records.size()) throw DomainError("entropy_monitor: T0 index out of range");
  auto np = [&](const MonitorRecord& r) { return p == 2.0 ? r.int_n2 : r.int_n3; };
  auto acc = [&](const MonitorRecord& r) { return p == 2.0 ? r.ndiss_p2 : r.ndiss_p3; };
  EntropyMonitorReport rep;
  rep.p = p;
  rep.t0_index = t0_index;
  const MonitorRecord& base = records[t0_index];
  rep.bound = 2.0 * np(base) * (1.0 + 1e-8);
  for (std::size_t i = t0_index; i < records.size(); ++i) {
    const double lhs = np(records[i]) + 0.5 * p * (p - 1.0) * (acc(records[i]) - acc(base));
    rep.max_ratio = std::max(rep.max_ratio, lhs / rep.bound);
    if (lhs > rep.bound) rep.pass = false;
    ++rep.checked;
  }
  return rep;
}

ConvergenceReport convergence_report(const std::vector<MonitorRecord>& records,
                                     std::size_t t0_index, double ratio_tol) {
  if (records.empty() || t0_index >= records.size())
    throw DomainError("convergence_report: T0 index out of range");
  const auto& a = records[t0_index].f;
  const auto& b = records.back().f;
  ConvergenceReport rep;
  rep.c_t0 = a.linf_c;
  rep.c_end = b.linf_c;
  rep.n_dev_t0 = a.linf_n_dev;
  rep.n_dev_end = b.linf_n_dev;
  rep.u_t0 = a.linf_u;
  rep.u_end = b.linf_u;
  rep.c_ok = rep.c_end <= ratio_tol * rep.c_t0;
  rep.n_ok = rep.n_dev_end <= ratio_tol * rep.n_dev_t0;
  rep.u_ok = rep.u_end <= ratio_tol * rep.u_t0;
  return rep;
}

CorollaryReport corollary34_check(const std::vector<MonitorRecord>& records, std::size_t t0_index,
                                  double tol) {
  if (records.empty() || t0_index >= records.size())
    throw DomainError("corollary34_check: T0 index out of range");
  CorollaryReport rep;
  const auto& first = records.front();
  const auto& base = records[t0_index];
  const auto& last = records.back();
  rep.consumed = last.consumed - first.consumed;
  rep.consumed_bound = first.f.l1_c;
  rep.grad_c_sq = last.grad_c_sq_int - base.grad_c_sq_int;
  rep.grad_c_bound = 0.5 * base.f.l2_c * base.f.l2_c;
  rep.consumed_ok = rep.consumed <= rep.consumed_bound + tol;
  rep.grad_c_ok = rep.grad_c_sq <= rep.grad_c_bound + tol;
  return rep;
}

CascadeReport epsilon_cascade(const SimConfig& config, const std::vector<double>& epsilons,
                              const std::vector<double>& checkpoints) {
  if (epsilons.size() < 2) throw DomainError("epsilon_cascade: need >= 2 epsilon values");
  if (checkpoints.empty()) throw DomainError("epsilon_cascade: need at least one checkpoint");
  for (double t : checkpoints)
    if (!(t > 0.0) || t > config.fluid.t_end + 0.5 * config.fluid.dt)
      throw DomainError("epsilon_cascade: checkpoint " + fmt(t) + " outside (0, t_end]");

  std::vector<std::future<RunResult>> jobs;
  for (double eps : epsilons) {
    SimConfig c = config;
    c.coefficients.epsilon = {eps};
    c.fluid.epsilon.reset();
    jobs.push_back(std::async(std::launch::async, [c, checkpoints]() {
      RunOptions opts;
      opts.capture_times = checkpoints;
      return run(c, opts);
    }));
  }
  CascadeReport rep;
  rep.epsilons = epsilons;
  rep.checkpoints = checkpoints;
  for (auto& j : jobs) rep.runs.push_back(j.get());
  for (const auto& r : rep.runs)
    if (r.captures.size() != checkpoints.size())
      throw DomainError("epsilon_cascade: run ended before every checkpoint was reached");

  const std::size_t ref = std::min_element(epsilons.begin(), epsilons.end()) - epsilons.begin();
  std::vector<double> sorted_checkpoints = checkpoints;
  std::sort(sorted_checkpoints.begin(), sorted_checkpoints.end());
  rep.discrepancy.assign(epsilons.size(), std::vector<double>(checkpoints.size(), 0.0));
  for (std::size_t e = 0; e < epsilons.size(); ++e)
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      // captures are in sorted-time order.
      const std::size_t slot =
          std::find(sorted_checkpoints.begin(), sorted_checkpoints.end(), checkpoints[k]) -
          sorted_checkpoints.begin();
      const ScalarField& a = rep.runs[e].captures[slot].n;
      const ScalarField& b = rep.runs[ref].captures[slot].n;
      ScalarField diff(a.grid());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a[i] - b[i]);
      rep.discrepancy[e][k] = integrate(diff);
    }

  std::vector<std::size_t> order(epsilons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return epsilons[a] > epsilons[b]; });
  for (std::size_t k = 0; k < checkpoints.size(); ++k)
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      if (rep.discrepancy[order[i + 1]][k] > 1.1 * rep.discrepancy[order[i]][k])
        rep.monotone = false;
  return rep;
}

}  // namespace ctns
