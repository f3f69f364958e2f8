#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ctns/error.hpp"
#include "ctns/oracle.hpp"

namespace ctns::oracle {

namespace {

struct Tiny {
  int nx, ny;
  double hx, hy;

  int cell(int i, int j) const { return i * ny + j; }
  // x faces: (nx+1) x ny, y faces: nx x (ny+1).
  int xface(int i, int j) const { return i * ny + j; }
  int yface(int i, int j) const { return i * (ny + 1) + j; }
};

Tiny tiny_of(const Grid& g) {
  if (g.dim != 2 || g.n[0] > 5 || g.n[1] > 5)
    throw DomainError("tiny grid oracle handles 2D grids up to 5x5");
  return {g.n[0], g.n[1], g.h[0], g.h[1]};
}

double mm(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::min(a, b);
  if (a < 0.0 && b < 0.0) return std::max(a, b);
  return 0.0;
}

// q on the face between q[lo] and q[hi] (lo at index m-1, hi at m along an
// axis with `count` cells), upwinded by the sign of `vel`. `far_lo` and
// `far_hi` are q[m-2] and q[m+1] when they exist.
double face_value(Limiter lim, double vel, double q_lo, double q_hi, const double* far_lo,
                  const double* far_hi) {
  if (lim == Limiter::Upwind) return vel >= 0.0 ? q_lo : q_hi;
  if (vel >= 0.0) {
    const double s = far_lo ? mm(q_lo - *far_lo, q_hi - q_lo) : 0.0;
    return q_lo + 0.5 * s;
  }
  const double s = far_hi ? mm(q_hi - q_lo, *far_hi - q_hi) : 0.0;
  return q_hi - 0.5 * s;
}

// Dense 5-point Neumann Laplacian.
Eigen::MatrixXd neumann_laplacian(const Tiny& t) {
  const int N = t.nx * t.ny;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  const double wx = 1.0 / (t.hx * t.hx), wy = 1.0 / (t.hy * t.hy);
  for (int i = 0; i < t.nx; ++i)
    for (int j = 0; j < t.ny; ++j) {
      const int c = t.cell(i, j);
      if (i > 0) { L(c, t.cell(i - 1, j)) += wx; L(c, c) -= wx; }
      if (i < t.nx - 1) { L(c, t.cell(i + 1, j)) += wx; L(c, c) -= wx; }
      if (j > 0) { L(c, t.cell(i, j - 1)) += wy; L(c, c) -= wy; }
      if (j < t.ny - 1) { L(c, t.cell(i, j + 1)) += wy; L(c, c) -= wy; }
    }
  return L;
}

Eigen::VectorXd implicit_heat(const Tiny& t, const Eigen::VectorXd& rhs, double dt) {
  const int N = t.nx * t.ny;
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) - dt * neumann_laplacian(t);
  return M.partialPivLu().solve(rhs);
}

double sample(const ScalarField& f, const Tiny& t, int i, int j) {
  return f.values()[std::size_t(t.cell(i, j))];
}

// Face flux functor signature: (vel_u, q_face_for_u, vel_w, q_face_for_w).
template <class FluxOfFace>
TinyStep explicit_update(const ScalarField& q, const VectorField& u, const VectorField* w,
                         const Tiny& t, double dt, Limiter lim, FluxOfFace&& flux_of) {
  TinyStep out;
  out.face_flux.assign(2, {});
  out.face_flux[0].assign(std::size_t((t.nx + 1) * t.ny), 0.0);
  out.face_flux[1].assign(std::size_t(t.nx * (t.ny + 1)), 0.0);
  auto ux = u.component(0), uy = u.component(1);

  for (int i = 1; i < t.nx; ++i)
    for (int j = 0; j < t.ny; ++j) {
      const double lo = sample(q, t, i - 1, j), hi = sample(q, t, i, j);
      double flo = 0, fhi = 0;
      const double* pl = nullptr;
      const double* ph = nullptr;
      if (i - 2 >= 0) { flo = sample(q, t, i - 2, j); pl = &flo; }
      if (i + 1 < t.nx) { fhi = sample(q, t, i + 1, j); ph = &fhi; }
      const int f = t.xface(i, j);
      const double vu = ux[std::size_t(f)];
      const double vw = w ? w->component(0)[std::size_t(f)] : 0.0;
      out.face_flux[0][std::size_t(f)] = flux_of(vu, face_value(lim, vu, lo, hi, pl, ph), vw,
                                                 face_value(lim, vw, lo, hi, pl, ph));
    }
  for (int i = 0; i < t.nx; ++i)
    for (int j = 1; j < t.ny; ++j) {
      const double lo = sample(q, t, i, j - 1), hi = sample(q, t, i, j);
      double flo = 0, fhi = 0;
      const double* pl = nullptr;
      const double* ph = nullptr;
      if (j - 2 >= 0) { flo = sample(q, t, i, j - 2); pl = &flo; }
      if (j + 1 < t.ny) { fhi = sample(q, t, i, j + 1); ph = &fhi; }
      const int f = t.yface(i, j);
      const double vu = uy[std::size_t(f)];
      const double vw = w ? w->component(1)[std::size_t(f)] : 0.0;
      out.face_flux[1][std::size_t(f)] = flux_of(vu, face_value(lim, vu, lo, hi, pl, ph), vw,
                                                 face_value(lim, vw, lo, hi, pl, ph));
    }

  out.values.resize(std::size_t(t.nx * t.ny));
  for (int i = 0; i < t.nx; ++i)
    for (int j = 0; j < t.ny; ++j) {
      const double west = out.face_flux[0][std::size_t(t.xface(i, j))];
      const double east = out.face_flux[0][std::size_t(t.xface(i + 1, j))];
      const double south = out.face_flux[1][std::size_t(t.yface(i, j))];
      const double north = out.face_flux[1][std::size_t(t.yface(i, j + 1))];
      out.values[std::size_t(t.cell(i, j))] =
          sample(q, t, i, j) - dt / t.hx * (east - west) - dt / t.hy * (north - south);
    }
  return out;
}

double F_value(double eps, double s) { return eps == 0.0 ? s : std::log1p(eps * s) / eps; }

}  // namespace

TinyStep tiny_n_step(const ScalarField& n, const ScalarField& c, const VectorField& u,
                     const Sensitivity& chi, double epsilon, double dt, Limiter limiter) {
  const Tiny t = tiny_of(n.grid());
  // Drift chi(c_f) (c_hi - c_lo) / h on interior faces.
  VectorField w(n.grid());
  auto wx = w.component(0), wy = w.component(1);
  for (int i = 1; i < t.nx; ++i)
    for (int j = 0; j < t.ny; ++j) {
      const double lo = sample(c, t, i - 1, j), hi = sample(c, t, i, j);
      wx[std::size_t(t.xface(i, j))] = chi(0.5 * (lo + hi)) * ((hi - lo) / t.hx);
    }
  for (int i = 0; i < t.nx; ++i)
    for (int j = 1; j < t.ny; ++j) {
      const double lo = sample(c, t, i, j - 1), hi = sample(c, t, i, j);
      wy[std::size_t(t.yface(i, j))] = chi(0.5 * (lo + hi)) * ((hi - lo) / t.hy);
    }

  TinyStep step = explicit_update(n, u, &w, t, dt, limiter,
                                  [&](double vu, double nu, double vw, double nw) {
                                    return vu * nu + vw * (nw / (1.0 + epsilon * nw));
                                  });
  const Eigen::VectorXd mid = Eigen::Map<const Eigen::VectorXd>(step.values.data(),
                                                                Eigen::Index(step.values.size()));
  const Eigen::VectorXd next = implicit_heat(t, mid, dt);
  for (Eigen::Index i = 0; i < next.size(); ++i) step.values[std::size_t(i)] = next[i];
  return step;
}

TinyStep tiny_c_step(const ScalarField& c, const ScalarField& n, const VectorField& u,
                     const Consumption& f, double epsilon, double dt, Limiter limiter,
                     ConsumptionMode mode) {
  const Tiny t = tiny_of(c.grid());
  TinyStep step = explicit_update(c, u, nullptr, t, dt, limiter,
                                  [](double vu, double cu, double, double) { return vu * cu; });
  const Eigen::VectorXd adv = Eigen::Map<const Eigen::VectorXd>(step.values.data(),
                                                                Eigen::Index(step.values.size()));
  const Eigen::VectorXd mid = implicit_heat(t, adv, dt);
  for (Eigen::Index i = 0; i < mid.size(); ++i) {
    const double cm = std::max(mid[i], 0.0);
    const double k = dt * F_value(epsilon, n.values()[std::size_t(i)]);
    double next;
    if (mode == ConsumptionMode::ExplicitClipped) {
      next = std::max(0.0, cm - k * f(cm));
    } else if (f.is_linear()) {
      next = cm / (1.0 + k);
    } else {
      double lo = 0.0, hi = cm;
      for (int it = 0; it < 200 && hi > lo; ++it) {
        const double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        (m + k * f(m) - cm > 0.0 ? hi : lo) = m;
      }
      next = 0.5 * (lo + hi);
    }
    step.values[std::size_t(i)] = next;
  }
  return step;
}

}  // namespace ctns::oracle
