#pragma once

// Time loop for the coupled system with its monitors: splitting
// n_step -> c_step -> ns_step per dt, functional records at a fixed cadence,
// hard checks (mass, positivity, finiteness) and soft inequality residuals.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctns/chemotaxis.hpp"
#include "ctns/coefficients.hpp"
#include "ctns/entropy.hpp"
#include "ctns/fields.hpp"
#include "ctns/fluid.hpp"
#include "ctns/functionals.hpp"

namespace ctns {

// ---- configuration -----------------------------------------------------------

struct GridSpec {
  int dim = 2;
  int nx = 64, ny = 64, nz = 1;
  double lx = 1.0, ly = 1.0, lz = 1.0;

  Grid make() const;
  bool operator==(const GridSpec&) const = default;
};

struct CoefficientSpec {
  std::string chi = "constant";  // constant | tabulated
  double chi_value = 1.0;
  std::vector<double> chi_points, chi_values;
  std::string f = "linear";  // linear | tabulated
  std::vector<double> f_points, f_values;
  std::string phi = "linear_gravity";  // linear_gravity | gridded
  double phi_g = 0.5;
  std::array<double, 3> phi_direction{0.0, -1.0, 0.0};
  std::string phi_file;  // whitespace-separated cell values, row-major
  /// Regularization parameters; simulate uses the first, cascade all of them.
  std::vector<double> epsilon{0.0};
  /// Upper end of the range on which structural hypotheses are sampled.
  double s_max = 10.0;

  Sensitivity sensitivity() const;
  Consumption consumption() const;
  Potential potential(const Grid& grid) const;
  bool operator==(const CoefficientSpec&) const = default;
};

struct FluidSpec {
  double dt = 2.5e-4;
  double t_end = 1.0;
  /// Yosida parameter; defaults to the regularization epsilon.
  std::optional<double> epsilon;
  double cfl_max = 0.5;
  double poisson_tol = 1e-10;
  int max_iters = 500;
  bool operator==(const FluidSpec&) const = default;
};

struct TransportSpec {
  Limiter limiter = Limiter::Upwind;
  ConsumptionMode consumption = ConsumptionMode::ImplicitPointwise;
  bool operator==(const TransportSpec&) const = default;
};

enum class DensityInit { GaussianBump, Uniform, Random, Snapshot };
enum class SignalInit { Uniform, Random, Snapshot };
enum class VelocityInit { Zero, VortexPair, Random, Snapshot };

struct InitialSpec {
  DensityInit n = DensityInit::GaussianBump;
  double n_background = 1.0;
  double n_amplitude = 2.0;
  double n_width = 0.15;
  std::array<double, 3> n_center{0.5, 0.7, 0.5};
  double n_value = 1.0;  // uniform value / random mean
  SignalInit c = SignalInit::Uniform;
  double c_value = 1.0;  // uniform value / random maximum
  VelocityInit u = VelocityInit::Zero;
  double u_amplitude = 0.5;
  std::uint64_t seed = 1;
  std::string snapshot;
  bool operator==(const InitialSpec&) const = default;
};

struct MonitorSpec {
  double kappa = 1.0;
  double sigma_n = 1e-12;
  double sigma_c = 1e-12;
  double tol_c_rel = 1e-6;
  double tol_energy_rel = 1e-8;
  double ratio_tol = 0.1;
  std::vector<double> entropy_p{2.0, 3.0};
  double entropy_delta = 0.1;
  /// sup of chi on (0,1) when unset.
  std::optional<double> chi1;
  double mass_tol = 1e-12;
  /// Monitors that abort the run: mass, positivity, linf_c, lemma31, energy1.
  std::vector<std::string> hard{"mass", "positivity"};
  bool operator==(const MonitorSpec&) const = default;
};

struct OutputSpec {
  int record_every = 100;
  bool operator==(const OutputSpec&) const = default;
};

struct SimConfig {
  GridSpec grid;
  CoefficientSpec coefficients;
  FluidSpec fluid;
  TransportSpec transport;
  InitialSpec initial;
  MonitorSpec monitors;
  OutputSpec output;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  double epsilon() const { return coefficients.epsilon.front(); }
  double yosida_epsilon() const { return fluid.epsilon.value_or(epsilon()); }
  long step_count() const;
  bool operator==(const SimConfig&) const = default;
};

// ---- state and model ----------------------------------------------------------

struct State {
  ScalarField n, c;
  VectorField u;
  ScalarField pressure;
  double t = 0.0;
  long step = 0;
};

/// Coefficients of one run, resolved on its grid.
struct Model {
  Sensitivity chi = Sensitivity::constant(1.0);
  Consumption f = Consumption::linear();
  Potential phi;
  RegularizedF F;
  double yosida_epsilon = 0.0;
  VectorField grad_phi;
  double chi1 = 1.0;

  static Model from_config(const SimConfig& config, const Grid& grid);
};

/// Initial (n, c, u); the velocity is projected onto solenoidal fields.
State initial_state(const SimConfig& config);

/// Smooth divergence-free vortex pair from the nodal stream function
/// A sin^2(pi x) sin(2 pi x) sin^2(pi y) (coordinates scaled to the box).
VectorField vortex_pair(const Grid& g, double amplitude);

// ---- monitoring ----------------------------------------------------------------

struct Event {
  double t = 0.0;
  std::string name;
  double value = 0.0;
};

class EventLog {
 public:
  void add(double t, std::string name, double value);
  const std::vector<Event>& events() const { return events_; }
  std::vector<Event> named(const std::string& name) const;
  /// "t=<t> event=<name> value=<value>" per line.
  std::string to_text() const;

 private:
  std::vector<Event> events_;
};

struct MonitorRecord {
  FunctionalSnapshot f;
  long step = 0;
  /// Signal inequality residuals (LHS - RHS): scheme quadrature and trapezoid rule.
  double lemma31_p1 = 0.0;
  double lemma31_p2 = 0.0;
  double lemma31_trap_p1 = 0.0;
  double lemma31_trap_p2 = 0.0;
  /// Largest per-step NS energy residual / (kinetic + 1) since the last record.
  double energy1_residual = 0.0;
  double int_n2 = 0.0;
  double int_n3 = 0.0;
  /// int_0^t int n^(p-2) |grad n|^2.
  double ndiss_p2 = 0.0;
  double ndiss_p3 = 0.0;
  /// int_0^t int F(n) f(c).
  double consumed = 0.0;
  /// int_0^t int |grad c|^2.
  double grad_c_sq_int = 0.0;
  double gn_ratio_u = std::numeric_limits<double>::quiet_NaN();
  double max_div_u = 0.0;
};

struct MonitorSummary {
  long steps = 0;
  double wall_seconds = 0.0;
  double max_mass_rel_dev = 0.0;
  double min_n = 0.0;
  double min_c = 0.0;
  bool linf_c_monotone = true;
  double max_linf_c_increase = 0.0;
  double lemma31_max[2] = {0.0, 0.0};
  double lemma31_trap_max[2] = {0.0, 0.0};
  double lemma31_baseline[2] = {0.0, 0.0};
  double energy1_max = 0.0;
  double energy_F_min = 0.0;
  int max_projection_iterations = 0;
  double max_div_u = 0.0;
};

struct RunOptions {
  /// States at these times (nearest step) are returned in RunResult::captures.
  std::vector<double> capture_times;
  /// Called after every record.
  std::function<void(const State&, const MonitorRecord&)> on_record;
};

struct RunResult {
  std::vector<MonitorRecord> records;
  EventLog events;
  State final;
  std::vector<State> captures;
  MonitorSummary summary;
  bool hard_failure = false;
  std::string failure;
};

/// Runs the configuration from its initial data. Solver and CFL failures
/// propagate as exceptions with the step index prepended.
RunResult run(const SimConfig& config, const RunOptions& options = {});
/// Runs from a given state.
RunResult run_from(const SimConfig& config, State state, const RunOptions& options = {});

struct EnergyFit {
  bool found = false;
  double K = 0.0;
  int exponent = -1;
  /// Smallest K (continuous) that would satisfy every record pair.
  double K_required = 0.0;
};
/// Smallest K = 2^k, k = 0..40, with (F_{i+1} - F_i)/dt + D_i/K <= K for all
/// consecutive records. Throws DomainError with fewer than 10 records.
EnergyFit fit_energy_K(const std::vector<MonitorRecord>& records);

/// Index of the first record with linf_c <= eta.
std::optional<std::size_t> detect_waiting_time(const std::vector<MonitorRecord>& records,
                                               double eta);

struct EntropyMonitorReport {
  bool pass = true;
  double p = 2.0;
  std::size_t t0_index = 0;
  double bound = 0.0;
  double max_ratio = 0.0;
  std::size_t checked = 0;
};
/// int n^p(t) + p(p-1)/2 int_{T0}^t int n^(p-2)|grad n|^2 <= 2 int n^p(T0) (1 + 1e-8)
/// at every record after T0. p must be 2 or 3.
EntropyMonitorReport entropy_monitor(const std::vector<MonitorRecord>& records,
                                     std::size_t t0_index, double p);

struct ConvergenceReport {
  double c_t0 = 0.0, c_end = 0.0;
  double n_dev_t0 = 0.0, n_dev_end = 0.0;
  double u_t0 = 0.0, u_end = 0.0;
  bool c_ok = false, n_ok = false, u_ok = false;
  bool all() const { return c_ok && n_ok && u_ok; }
};
ConvergenceReport convergence_report(const std::vector<MonitorRecord>& records,
                                     std::size_t t0_index, double ratio_tol);

struct CorollaryReport {
  double consumed = 0.0;       // int_{t0}^{t_end} int F(n) f(c)
  double consumed_bound = 0.0; // int c(t0)
  double grad_c_sq = 0.0;      // int_{T0}^{t_end} int |grad c|^2
  double grad_c_bound = 0.0;   // 1/2 int c^2(T0)
  bool consumed_ok = true;
  bool grad_c_ok = true;
};
CorollaryReport corollary34_check(const std::vector<MonitorRecord>& records, std::size_t t0_index,
                                  double tol);

struct CascadeReport {
  std::vector<double> epsilons;  // in the order given
  std::vector<double> checkpoints;
  /// discrepancy[e][k] = || n_eps - n_eps_min ||_L1 at checkpoint k.
  std::vector<std::vector<double>> discrepancy;
  /// Nonincreasing along decreasing eps (10% slack) at every checkpoint.
  bool monotone = true;
  std::vector<RunResult> runs;
};
/// Runs the configuration once per epsilon (concurrently) and compares the
/// densities at the checkpoints. Throws DomainError for fewer than 2 values.
CascadeReport epsilon_cascade(const SimConfig& config, const std::vector<double>& epsilons,
                              const std::vector<double>& checkpoints);

/// Functionals of a state.
FunctionalSnapshot evaluate_functionals(const State& s, const Model& model,
                                        const MonitorSpec& monitors, double n_mean,
                                        const EntropyPair& pair2, const EntropyPair& pair3);

}  // namespace ctns
