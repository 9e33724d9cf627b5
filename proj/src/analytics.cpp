#include "muxrep/analytics.hpp"

#include <cmath>

namespace muxrep::analytics {

namespace {

void require_positive(double p, const char* name) {
  if (!(p > 0.0)) throw DivergentError(std::string("divergent mean time: ") + name + " = 0");
}

}  // namespace

double q_pow(double p, double k) {
  if (k == 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  return std::exp(k * std::log1p(-p));
}

double one_minus_q_pow(double p, double k) {
  if (k == 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(k * std::log1p(-p));
}

double mean_time_infinite(Probability p0, Probability p1) {
  require_positive(p0, "p0");
  require_positive(p1, "p1");
  const double p = p0;
  return (3.0 - p * p) / (p * p1 * (2.0 - p));
}

WaitingTerms mean_Z_terms(Probability p0, TimeUnits tau) {
  require_positive(p0, "p0");
  const double p = p0;
  const double q = p0.complement();
  const double t = static_cast<double>(tau.value());
  // 2 - p0 - 2 q^(tau+1), written so that it does not cancel for small p0.
  const double denom = 2.0 * one_minus_q_pow(p, t + 1.0) - p;

  WaitingTerms z;
  z.waiting = 1.0 / (p * denom);
  z.fruitless = 2.0 * t * q_pow(p, t + 1.0) / denom;
  // 1 - q^tau (1 + tau p0) = -expm1(tau log q + log1p(tau p0))
  double unexpired = 0.0;
  if (tau.value() > 0 && q > 0.0) unexpired = -std::expm1(t * std::log1p(-p) + std::log1p(t * p));
  z.second = 2.0 * q * unexpired / (p * denom);
  return z;
}

double mean_Z_finite(Probability p0, TimeUnits tau) { return mean_Z_terms(p0, tau).total(); }

double mean_time_finite(Probability p0, Probability p1, TimeUnits tau) {
  require_positive(p0, "p0");
  require_positive(p1, "p1");
  // (<T>_inf - ((1+p0)/(p0 p1)) x) / (1 - x) with x = q^(tau+1)/(1 - p0/2),
  // multiplied through by (1 - p0/2) and expressed via w = 1 - q^(tau+1).
  const double p = p0;
  const double w = one_minus_q_pow(p, static_cast<double>(tau.value()) + 1.0);
  const double num = 1.0 - 2.0 * p - p * p + 2.0 * (1.0 + p) * w;
  return num / (2.0 * p * p1 * (w - 0.5 * p));
}

DoublingStats doubling_stats(Probability p0, Probability p1, TimeUnits tau) {
  DoublingStats s;
  s.mean_Z = mean_Z_finite(p0, tau);
  s.mean_T = mean_time_finite(p0, p1, tau);
  s.rate = 1.0 / s.mean_T;
  return s;
}

double mean_Z_asymptotic(Probability p0, TimeUnits tau) {
  require_positive(p0, "p0");
  const double p = p0;
  const double t = static_cast<double>(tau.value());
  const double g = 1.0 + 2.0 * t;
  return 1.0 / (p * p * g) + 2.0 * t / (p * g) + 2.0 * t * t * (1.0 - p) / g;
}

bool asymptotic_regime(Probability p0, TimeUnits tau) {
  return p0.value() * (static_cast<double>(tau.value()) + 1.0) < 1.0;
}

MultiplexedRate multiplexed_rate(Probability p0, Probability p1, TimeUnits tau, int n) {
  require_positive(p0, "p0");
  require_positive(p1, "p1");
  if (n < 1) throw ValidationError("elements must be positive: n = " + std::to_string(n));
  const double p = p0;
  const double dn = n;
  const double t = static_cast<double>(tau.value());

  const double a = one_minus_q_pow(p, dn);       // 1 - q^n
  const double y = q_pow(p, dn * t);             // q^(n tau)
  const double one_minus_y = one_minus_q_pow(p, dn * t);
  // 1 + q^n - 2 q^(n(tau+1))
  const double f = 2.0 * one_minus_y - a * (1.0 - 2.0 * y);
  // 1 + 2 q^n - q^(2n) - 4 q^(n(tau+1)) + 2 q^(n(tau+2))
  const double base = 2.0 * one_minus_y - a * a * (1.0 - 2.0 * y);

  MultiplexedRate out;
  if (n == 1) {
    // The numerator and denominator factors of alpha coincide.
    out.alpha = 1.0;
  } else {
    const double m = 2.0 * dn - 1.0;
    const double omq_m = one_minus_q_pow(p, m);
    out.alpha = q_pow(p, dn - 1.0) * a * (omq_m + 2.0 * q_pow(p, 3.0 * dn - 2.0) * one_minus_q_pow(p, t * m)) /
                (omq_m * f);
  }
  out.rate = p1 * a * f / (base + out.alpha);
  return out;
}

namespace literal {

double mean_time_finite(double p0, double p1, std::int64_t tau) {
  const double q = 1.0 - p0;
  const double t_inf = (3.0 - p0 * p0) / (p0 * p1 * (2.0 - p0));
  const double x = std::pow(q, static_cast<double>(tau) + 1.0) / (1.0 - p0 / 2.0);
  return (t_inf - ((1.0 + p0) / (p0 * p1)) * x) / (1.0 - x);
}

MultiplexedRate multiplexed_rate(double p0, double p1, std::int64_t tau, int n) {
  const double q = 1.0 - p0;
  const double t = static_cast<double>(tau);
  const auto qp = [q](double k) { return std::pow(q, k); };
  MultiplexedRate out;
  out.alpha = qp(n - 1) * (1.0 - qp(n)) * (1.0 - qp(2 * n - 1) + 2.0 * qp(3 * n - 2) * (1.0 - qp(t * (2 * n - 1)))) /
              ((1.0 - qp(2 * n - 1)) * (1.0 + qp(n) - 2.0 * qp((t + 1.0) * n)));
  out.rate = p1 * (1.0 - qp(n)) * (1.0 + qp(n) - 2.0 * qp(n * (t + 1.0))) /
             (1.0 + 2.0 * qp(n) - qp(2 * n) - 4.0 * qp(n * (t + 1.0)) + 2.0 * qp(n * (t + 2.0)) + out.alpha);
  return out;
}

}  // namespace literal

}  // namespace muxrep::analytics
