#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ctns/fields.hpp"

namespace ctns {

/// Preconditioned conjugate gradients for a symmetric positive
/// (semi-)definite operator. `apply(in, out)` computes out = A in and
/// `precondition(in, out)` computes out = M^{-1} in. x holds the initial
/// guess on entry. Stops when ||b - A x|| <= rel_tol ||b||.
template <class Apply, class Precondition>
SolveStats pcg(Apply&& apply, Precondition&& precondition, std::span<const double> b,
               std::span<double> x, double rel_tol, int max_iters) {
  const std::size_t n = b.size();
  SolveStats stats;
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return stats;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  apply(std::span<const double>(x), std::span<double>(q));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  double rnorm = std::sqrt(dot(r, r));
  stats.rel_residual = rnorm / bnorm;
  if (stats.rel_residual <= rel_tol) return stats;

  precondition(std::span<const double>(r), std::span<double>(z));
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iters; ++it) {
    apply(std::span<const double>(p), std::span<double>(q));
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      stats.iterations = it;
      return stats;  // breakdown: residual is already at rounding level
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rnorm = std::sqrt(dot(r, r));
    stats.iterations = it;
    stats.rel_residual = rnorm / bnorm;
    if (stats.rel_residual <= rel_tol) return stats;
    precondition(std::span<const double>(r), std::span<double>(z));
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return stats;
}

}  // namespace ctns
