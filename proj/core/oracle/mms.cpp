#include <cmath>
#include <numbers>

#include "ctns/error.hpp"
#include "ctns/fluid.hpp"
#include "ctns/oracle.hpp"

namespace ctns::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// Volume-weighted L2 distance between a field and point values of `exact`
// at the cell centres.
template <class Exact>
double l2_error(const ScalarField& f, Exact&& exact) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      const auto x = g.cell_center(i, j);
      const double d = f(i, j) - exact(x[0], x[1]);
      acc += d * d;
    }
  return std::sqrt(acc * g.cell_volume());
}

std::vector<double> orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

bool all_at_least(const std::vector<double>& v, double required) {
  for (double x : v)
    if (!(x >= required)) return false;
  return true;
}

ScalarField heat_run(const Grid& g, double dt, long steps) {
  ScalarField f(g);
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j) {
      const auto x = g.cell_center(i, j);
      f(i, j) = std::cos(kPi * x[0]) * std::cos(kPi * x[1]);
    }
  const SolveOptions opts{1e-13, 1000};
  for (long s = 0; s < steps; ++s) f = laplacian_solve(f, dt, ScalarBc::Neumann, opts);
  return f;
}

void heat_neumann(MmsResult& r, int k) {
  const double T = 0.02;
  // Spatial: dt tied to h^2 so the time error refines at the same rate.
  for (int l = 0; l < k; ++l) {
    const int m = 16 << l;
    const Grid g = Grid::make(m, m);
    const long steps = std::lround(std::ceil(T / (0.2 * g.h[0] * g.h[0])));
    const ScalarField f = heat_run(g, T / double(steps), steps);
    const double decay = std::exp(-2.0 * kPi * kPi * T);
    r.resolutions.push_back(m);
    r.spatial_errors.push_back(l2_error(f, [&](double x, double y) {
      return decay * std::cos(kPi * x) * std::cos(kPi * y);
    }));
  }
  // Temporal: cos(pi x) cos(pi y) is an exact eigenvector of the discrete
  // Neumann Laplacian, so the semi-discrete solution is known in closed form.
  const Grid g = Grid::make(32, 32);
  const double s = std::sin(0.5 * kPi * g.h[0]);
  const double lambda_h = 2.0 * 4.0 * s * s / (g.h[0] * g.h[0]);
  for (int l = 0; l < k; ++l) {
    const long steps = 10L << l;
    const double dt = T / double(steps);
    const ScalarField f = heat_run(g, dt, steps);
    const double decay = std::exp(-lambda_h * T);
    r.time_steps.push_back(dt);
    r.temporal_errors.push_back(l2_error(f, [&](double x, double y) {
      return decay * std::cos(kPi * x) * std::cos(kPi * y);
    }));
  }
  r.spatial_required = 1.8;
  r.temporal_required = 0.9;
}

void advdiff(MmsResult& r, int k) {
  // Unit diffusion, stream U along x, Gaussian of variance s0 centred at x0.
  // Free-space solution; the tail at the walls is below 1e-10. The upwind
  // error (extra diffusion U h / 2) has the opposite sign of the Laplacian's
  // h^2 error, so a fast stream makes the observed order dip below 1 before
  // the asymptotic regime; U = 2 keeps the two well separated.
  const double U = 2.0, s0 = 0.001, T = 0.002;
  const double x0 = 0.5, y0 = 0.5;
  auto exact = [&](double t, double x, double y) {
    const double v = s0 + 2.0 * t;
    const double dx = x - x0 - U * t, dy = y - y0;
    return (s0 / v) * std::exp(-(dx * dx + dy * dy) / (2.0 * v));
  };
  for (int l = 0; l < k; ++l) {
    const int m = 32 << l;
    const Grid g = Grid::make(m, m);
    ScalarField c(g), n(g, 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const auto x = g.cell_center(i, j);
        c(i, j) = exact(0.0, x[0], x[1]);
      }
    VectorField u(g);
    for (int i = 1; i < m; ++i)
      for (int j = 0; j < m; ++j) u.at(0, i, j) = U;
    const long steps = std::lround(std::ceil(T / (0.2 * g.h[0] * g.h[0])));
    TransportStepParams p;
    p.dt = T / double(steps);
    p.solve = {1e-13, 1000};
    const Consumption f = Consumption::linear();
    const RegularizedF F{0.0};
    for (long s = 0; s < steps; ++s) c = c_step(c, n, u, f, F, p).c;
    r.resolutions.push_back(m);
    r.spatial_errors.push_back(l2_error(c, [&](double x, double y) { return exact(T, x, y); }));
  }
  r.spatial_required = 0.9;
}

void stokes_diffusion(MmsResult& r, int k) {
  const Grid g = Grid::make(16, 16);
  const StokesMode mode = stokes_eigenmode(g);
  const double T = 0.02;
  const double decay = std::exp(-mode.lambda * T);
  for (int l = 0; l < k; ++l) {
    const long steps = 10L << l;
    const double dt = T / double(steps);
    VectorField u = mode.mode;
    for (long s = 0; s < steps; ++s) u = stokes_resolvent(u, dt, 1e-13, 1000);
    double acc = 0.0;
    for (int d = 0; d < 2; ++d) {
      const auto a = u.component(d);
      const auto b = mode.mode.component(d);
      for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - decay * b[i]) * (a[i] - decay * b[i]);
    }
    r.time_steps.push_back(dt);
    r.temporal_errors.push_back(std::sqrt(acc));
  }
  r.temporal_required = 0.9;
}

}  // namespace

std::string to_string(MmsOperator op) {
  switch (op) {
    case MmsOperator::HeatNeumann: return "heat_neumann";
    case MmsOperator::AdvDiff: return "advdiff";
    case MmsOperator::StokesDiffusion: return "stokes_diffusion";
  }
  return "?";
}

MmsResult mms_convergence(MmsOperator op, int k) {
  if (k < 3) throw DomainError("mms_convergence needs at least 3 refinement levels");
  MmsResult r;
  r.op = op;
  switch (op) {
    case MmsOperator::HeatNeumann: heat_neumann(r, k); break;
    case MmsOperator::AdvDiff: advdiff(r, k); break;
    case MmsOperator::StokesDiffusion: stokes_diffusion(r, k); break;
  }
  r.spatial_orders = orders(r.spatial_errors);
  r.temporal_orders = orders(r.temporal_errors);
  r.pass = all_at_least(r.spatial_orders, r.spatial_required) &&
           all_at_least(r.temporal_orders, r.temporal_required);
  return r;
}

}  // namespace ctns::oracle
