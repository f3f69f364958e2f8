#include "ctns/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ctns/error.hpp"

namespace ctns {

namespace {

constexpr double kSlack = 1e-12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

// ---- CubicSpline -------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw DomainError("spline needs >= 2 matching points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw DomainError("spline knots must be strictly increasing");
  // Natural end conditions; Thomas algorithm on the interior equations.
  m_.assign(n, 0.0);
  if (n == 2) return;
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1];
    const double h1 = x_[i + 1] - x_[i];
    a[i] = h0;
    b[i] = 2.0 * (h0 + h1);
    c[i] = h1;
    r[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  m_[n - 2] = r[n - 2] / b[n - 2];
  for (std::size_t i = n - 2; i-- > 1;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t CubicSpline::interval(double s) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), s);
  const std::size_t i = it == x_.begin() ? 0 : std::size_t(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double CubicSpline::value(double s) const {
  if (s < x_.front()) return y_.front() + d1(x_.front()) * (s - x_.front());
  if (s > x_.back()) return y_.back() + d1(x_.back()) * (s - x_.back());
  const std::size_t i = interval(s);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - s) / h;
  const double B = (s - x_[i]) / h;
  return A * y_[i] + B * y_[i + 1] +
         ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::d1(double s) const {
  const double sc = std::clamp(s, x_.front(), x_.back());
  const std::size_t i = interval(sc);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - sc) / h;
  const double B = (sc - x_[i]) / h;
  return (y_[i + 1] - y_[i]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
         (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
}

double CubicSpline::d2(double s) const {
  if (s < x_.front() || s > x_.back()) return 0.0;
  const std::size_t i = interval(s);
  const double h = x_[i + 1] - x_[i];
  const double A = (x_[i + 1] - s) / h;
  const double B = (s - x_[i]) / h;
  return A * m_[i] + B * m_[i + 1];
}

// ---- Sensitivity / Consumption -------------------------------------------------

Sensitivity Sensitivity::constant(double value) {
  if (!(value > 0.0)) throw DomainError("chi must be positive");
  Sensitivity s;
  s.value_ = value;
  return s;
}

Sensitivity Sensitivity::tabulated(std::vector<double> s, std::vector<double> chi) {
  for (double v : chi)
    if (!(v > 0.0)) throw DomainError("tabulated chi must be positive");
  Sensitivity out;
  out.spline_.emplace(std::move(s), std::move(chi));
  return out;
}

Derivs Sensitivity::eval(double s) const {
  if (!spline_) return {value_, 0.0, 0.0};
  return {spline_->value(s), spline_->d1(s), spline_->d2(s)};
}

double Sensitivity::sup(double lo, double hi, int samples) const {
  if (!spline_) return value_;
  double m = std::max(eval(lo).value, eval(hi).value);
  for (double x : linspace(lo, hi, samples)) m = std::max(m, eval(x).value);
  for (double k : spline_->knots())
    if (k >= lo && k <= hi) m = std::max(m, eval(k).value);
  return m;
}

Consumption Consumption::linear() { return Consumption{}; }

Consumption Consumption::tabulated(std::vector<double> s, std::vector<double> f) {
  if (s.empty() || s.front() != 0.0 || f.front() != 0.0)
    throw DomainError("tabulated f must start at f(0) = 0");
  for (std::size_t i = 1; i < f.size(); ++i)
    if (!(f[i] > 0.0)) throw DomainError("tabulated f must be positive for s > 0");
  Consumption out;
  out.spline_.emplace(std::move(s), std::move(f));
  return out;
}

Derivs Consumption::eval(double s) const {
  if (!spline_) return {s, 1.0, 0.0};
  return {spline_->value(s), spline_->d1(s), spline_->d2(s)};
}

// ---- Potential -------------------------------------------------------------------

Potential Potential::linear_gravity(std::array<double, 3> direction, double g) {
  if (!(g >= 0.0)) throw DomainError("gravity magnitude must be >= 0");
  const double norm = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                                direction[2] * direction[2]);
  if (!(norm > 0.0)) throw DomainError("gravity direction must be nonzero");
  Potential p;
  for (int d = 0; d < 3; ++d) p.direction_[d] = direction[d] / norm;
  p.g_ = g;
  return p;
}

Potential Potential::gridded(ScalarField values) {
  if (!values.all_finite()) throw DomainError("gridded potential must be finite");
  Potential p;
  p.values_ = std::move(values);
  return p;
}

VectorField Potential::face_gradient(const Grid& grid) const {
  if (values_) {
    if (!(values_->grid() == grid)) throw DomainError("gridded potential grid mismatch");
    return gradient(*values_);
  }
  VectorField out(grid);
  for (int d = 0; d < grid.dim; ++d) {
    const auto e = grid.face_extent(d);
    auto comp = out.component(d);
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j)
        for (int k = 0; k < e[2]; ++k) {
          const std::array<int, 3> idx{i, j, k};
          if (idx[d] == 0 || idx[d] == grid.n[d]) continue;
          comp[grid.face(d, i, j, k)] = g_ * direction_[d];
        }
  }
  return out;
}

double Potential::gradient_linf(const Grid& grid) const { return linf_norm(face_gradient(grid)); }

// ---- RegularizedF ------------------------------------------------------------------

double RegularizedF::value(double s) const {
  return epsilon == 0.0 ? s : std::log1p(epsilon * s) / epsilon;
}

double RegularizedF::derivative(double s) const { return 1.0 / (1.0 + epsilon * s); }

ValueDerivative f_eps_eval(const RegularizedF& F, double s) {
  if (!(s >= 0.0)) throw DomainError("F_eps is defined for s >= 0, got " + fmt(s));
  if (!(F.epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  return {F.value(s), F.derivative(s)};
}

// ---- checks ------------------------------------------------------------------------

CheckReport check_F_conditions(const std::function<double(double)>& F,
                               const std::function<double(double)>& dF,
                               std::span<const double> samples) {
  if (samples.empty()) throw DomainError("check_F_conditions: empty sample set");
  CheckReport rep;
  auto fail = [&](std::size_t idx, std::string msg) {
    if (!rep.first_index) rep.first_index = idx;
    rep.pass = false;
    rep.violations.push_back(std::move(msg));
  };
  const double f0 = F(0.0);
  if (std::abs(f0) > kSlack) fail(0, "F(0)=" + fmt(f0) + " != 0");

  // Track the worst violation of each inequality.
  double worst_lo = 0.0, worst_hi = 0.0, worst_half = 0.0;
  std::size_t i_lo = 0, i_hi = 0, i_half = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = samples[i];
    const double d = dF(s);
    if (-d > worst_lo) worst_lo = -d, i_lo = i;
    if (d - 1.0 > worst_hi) worst_hi = d - 1.0, i_hi = i;
    if (s <= 1.0) {
      const double gap = 0.5 * s - F(s);
      if (gap > worst_half) worst_half = gap, i_half = i;
    }
  }
  if (worst_lo > kSlack)
    fail(i_lo, "F'(" + fmt(samples[i_lo]) + ")=" + fmt(dF(samples[i_lo])) + " < 0");
  if (worst_hi > kSlack)
    fail(i_hi, "F'(" + fmt(samples[i_hi]) + ")=" + fmt(dF(samples[i_hi])) + " > 1");
  if (worst_half > kSlack)
    fail(i_half, "F(" + fmt(samples[i_half]) + ")=" + fmt(F(samples[i_half])) + " < " +
                     fmt(0.5 * samples[i_half]));
  return rep;
}

CheckReport check_F_conditions(const RegularizedF& F, std::span<const double> samples) {
  if (!(F.epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  return check_F_conditions([F](double s) { return F.value(s); },
                            [F](double s) { return F.derivative(s); }, samples);
}

CheckReport check_structural(const Sensitivity& chi, const Consumption& f,
                             std::span<const double> samples) {
  if (samples.empty()) throw DomainError("check_structural: empty sample set");
  CheckReport rep;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = samples[i];
    const Derivs c = chi.eval(s);
    const Derivs g = f.eval(s);
    if (!std::isfinite(c.d2) || !std::isfinite(g.d2))
      throw DomainError("check_structural: coefficient not twice differentiable at " + fmt(s));
    const double num = g.d1 * c.value - g.value * c.d1;  // chi^2 (f/chi)'
    const double ratio_d1 = num / (c.value * c.value);
    const double ratio_d2 = (g.d2 * c.value - g.value * c.d2) / (c.value * c.value) -
                            2.0 * c.d1 * num / (c.value * c.value * c.value);
    const double prod_d2 = c.d2 * g.value + 2.0 * c.d1 * g.d1 + c.value * g.d2;
    std::vector<std::string> msgs;
    if (!(ratio_d1 > -kSlack)) msgs.push_back("(f/chi)'(" + fmt(s) + ")=" + fmt(ratio_d1) + " <= 0");
    if (!(ratio_d2 <= kSlack)) msgs.push_back("(f/chi)''(" + fmt(s) + ")=" + fmt(ratio_d2) + " > 0");
    if (!(prod_d2 >= -kSlack)) msgs.push_back("(chi f)''(" + fmt(s) + ")=" + fmt(prod_d2) + " < 0");
    if (!msgs.empty()) {
      rep.pass = false;
      rep.first_index = i;
      rep.violations = std::move(msgs);
      break;
    }
  }
  return rep;
}

double chi_over_f_lower(const Sensitivity& chi, const Consumption& f, double M, int samples) {
  if (!(M > 0.0)) throw DomainError("chi_over_f_lower requires M > 0");
  if (samples < 1) throw DomainError("chi_over_f_lower requires samples >= 1");
  double inf = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= samples; ++k) {
    const double s = M * k / samples;
    inf = std::min(inf, f(s) / (s * chi(s)));
  }
  return std::max(inf, 0.0);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
  return out;
}

}  // namespace ctns
