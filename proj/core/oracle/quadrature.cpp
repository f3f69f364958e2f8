#include <cmath>
#include <string>

#include "ctns/error.hpp"
#include "ctns/oracle.hpp"

namespace ctns::oracle {

double quadrature_reference(const std::function<double(double)>& integrand, double a, double b,
                            long panels) {
  if (panels < 10'000) throw DomainError("quadrature_reference needs at least 10^4 panels");
  if (panels % 2) ++panels;
  const double h = (b - a) / double(panels);
  auto sample = [&](long i) {
    const double x = i == panels ? b : a + double(i) * h;
    const double v = integrand(x);
    if (!std::isfinite(v))
      throw DomainError("non-finite integrand at x = " + std::to_string(x));
    return v;
  };
  // Kahan-compensated accumulation of the interior weights.
  double sum = 0.0, comp = 0.0;
  for (long i = 1; i < panels; ++i) {
    const double term = (i % 2 ? 4.0 : 2.0) * sample(i) - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return h / 3.0 * (sample(0) + sum + sample(panels));
}

double psi_reference(const EntropyPair& pair, double s, long panels) {
  if (s < 0.0) throw DomainError("psi_reference requires s >= 0");
  if (s == 0.0) return 0.0;
  // sigma = s t: p s^p int_0^1 t^(p-1) / (1 + delta s^q t^q) dt.
  const double sq = std::pow(s, pair.q);
  const double integral = quadrature_reference(
      [&](double t) {
        if (t == 0.0) return 0.0;
        return std::pow(t, pair.p - 1.0) / (1.0 + pair.delta * sq * std::pow(t, pair.q));
      },
      0.0, 1.0, panels);
  return pair.p * std::pow(s, pair.p) * integral;
}

}  // namespace ctns::oracle
