#pragma once

// Model coefficient functions: chemotactic sensitivity chi, signal
// consumption rate f, gravitational potential Phi, and the flux saturation
// F_eps(s) = ln(1 + eps s) / eps used by the regularized system.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctns/fields.hpp"

namespace ctns {

/// Natural cubic spline through (x_i, y_i); C^2 on [x_0, x_n]. Outside the
/// range it continues linearly with the end slope.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::size_t interval(double s) const;
  std::vector<double> x_, y_, m_;  // m_: second derivatives at knots
};

struct Derivs {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class Sensitivity {
 public:
  static Sensitivity constant(double value);
  static Sensitivity tabulated(std::vector<double> s, std::vector<double> chi);

  bool is_constant() const { return !spline_.has_value(); }
  double constant_value() const { return value_; }
  const CubicSpline* spline() const { return spline_ ? &*spline_ : nullptr; }

  double operator()(double s) const { return eval(s).value; }
  Derivs eval(double s) const;
  /// sup of chi over [lo, hi], sampled at the knots and `samples` points.
  double sup(double lo, double hi, int samples = 1000) const;

 private:
  double value_ = 1.0;
  std::optional<CubicSpline> spline_;
};

class Consumption {
 public:
  static Consumption linear();
  static Consumption tabulated(std::vector<double> s, std::vector<double> f);

  bool is_linear() const { return !spline_.has_value(); }
  const CubicSpline* spline() const { return spline_ ? &*spline_ : nullptr; }

  double operator()(double s) const { return eval(s).value; }
  Derivs eval(double s) const;

 private:
  std::optional<CubicSpline> spline_;
};

class Potential {
 public:
  /// Phi(x) = g * (direction . x); direction is normalized.
  static Potential linear_gravity(std::array<double, 3> direction, double g);
  /// Phi given per cell of `grid`.
  static Potential gridded(ScalarField values);

  bool is_linear() const { return !values_.has_value(); }
  const std::array<double, 3>& direction() const { return direction_; }
  double magnitude() const { return g_; }
  const ScalarField* values() const { return values_ ? &*values_ : nullptr; }

  /// grad Phi on interior faces of `grid`, zero on boundary faces.
  VectorField face_gradient(const Grid& grid) const;
  /// || grad Phi ||_inf on the grid.
  double gradient_linf(const Grid& grid) const;

 private:
  std::array<double, 3> direction_{0.0, -1.0, 0.0};
  double g_ = 0.0;
  std::optional<ScalarField> values_;
};

/// F_eps(s) = ln(1 + eps s)/eps; eps == 0 is the identity.
struct RegularizedF {
  double epsilon = 0.0;

  double value(double s) const;
  double derivative(double s) const;
};

struct ValueDerivative {
  double value;
  double derivative;
};

/// Throws DomainError for s < 0 or epsilon < 0.
ValueDerivative f_eps_eval(const RegularizedF& F, double s);

struct CheckReport {
  bool pass = true;
  /// Human-readable descriptions, worst violation of each kind first.
  std::vector<std::string> violations;
  /// Index into the samples of the first violation, if any.
  std::optional<std::size_t> first_index;
};

/// Checks F(0) = 0, 0 <= F' <= 1 and F(s) >= s/2 on [0,1] at the samples,
/// with absolute tolerance 1e-12. Throws DomainError on an empty sample set.
CheckReport check_F_conditions(const std::function<double(double)>& F,
                               const std::function<double(double)>& dF,
                               std::span<const double> samples);
CheckReport check_F_conditions(const RegularizedF& F, std::span<const double> samples);

/// Checks (f/chi)' > 0, (f/chi)'' <= 0 and (chi f)'' >= 0 at the samples
/// with slack 1e-12.
CheckReport check_structural(const Sensitivity& chi, const Consumption& f,
                             std::span<const double> samples);

/// Sampled infimum of f(s)/(s chi(s)) over (0, M], clamped below by 0.
double chi_over_f_lower(const Sensitivity& chi, const Consumption& f, double M,
                        int samples = 10000);

/// n evenly spaced points on [a, b].
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace ctns
