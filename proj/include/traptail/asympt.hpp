#pragma once

// Log-periodic asymptotics of the tail.
//
//   f(t)  = sum_{k>=0} (1-a) a^k exp(-b^{-k} t)
//   f*(z) = Gamma(z) (1-a) / (1 - a b^z),   poles chi_k = rho + 2 pi i k / ln b
//   f(t) ~ A t^{-rho} [1 + sum_k c_k cos(2 pi k ln t / ln b - d_k)]
//   A = (1-a) Gamma(rho) / ln b,  c_k = 2 |Gamma(chi_k)| / Gamma(rho),  d_k = arg Gamma(chi_k)
//   g(t) = ((b-1)/b) A (2b/(b-1)^2)^rho [1 + ...]

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "traptail/complex_gamma.hpp"
#include "traptail/errors.hpp"
#include "traptail/model.hpp"
#include "traptail/numeric.hpp"

namespace traptail {

inline constexpr int kDefaultModes = 10;
inline constexpr double kDefaultRegimeGuard = 2.0;

struct OscillationMode {
  int k = 0;
  double c = 0.0;  // amplitude
  double d = 0.0;  // phase in (-pi, pi]
  Complex chi;     // pole location
};

struct OscillationSpectrum {
  double rho = 0.0;
  double beta = 0.0;
  double log_beta = 0.0;
  double power_prefactor = 0.0;  // A
  double prefactor = 0.0;        // constant in front of the bracket of g
  std::vector<OscillationMode> modes;
  bool bracket_positive = true;  // sum c_k < 1

  double amplitude_sum() const noexcept {
    double s = 0.0;
    for (const auto& m : modes) s += m.c;
    return s;
  }
};

inline Complex chi(const ModelParams& p, int k) {
  return {p.rho(), 2.0 * std::numbers::pi * k / p.log_beta()};
}

inline OscillationSpectrum oscillation_spectrum(const ModelParams& p, int modes_max = kDefaultModes) {
  if (modes_max < 0) throw DomainError("oscillation_spectrum: modes_max must be >= 0");
  OscillationSpectrum s;
  s.rho = p.rho();
  s.beta = p.beta();
  s.log_beta = p.log_beta();
  const double lg_rho = std::lgamma(s.rho);
  s.power_prefactor = (1.0 - p.alpha()) * std::exp(lg_rho) / s.log_beta;
  const double b = s.beta;
  s.prefactor = (b - 1.0) / b * s.power_prefactor * std::pow(2.0 * b / ((b - 1.0) * (b - 1.0)), s.rho);
  for (int k = 1; k <= modes_max; ++k) {
    OscillationMode m;
    m.k = k;
    m.chi = chi(p, k);
    const Complex lg = log_complex_gamma(m.chi);
    m.c = 2.0 * std::exp(lg.real() - lg_rho);
    double d = std::remainder(lg.imag(), 2.0 * std::numbers::pi);
    if (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    m.d = d;
    s.modes.push_back(m);
  }
  s.bracket_positive = s.amplitude_sum() < 1.0;
  return s;
}

// 1 + sum_k c_k cos(2 pi k ln t / ln b - d_k)
inline double oscillation_bracket(const OscillationSpectrum& s, double t) {
  if (!(t > 0.0)) throw DomainError("oscillation bracket: t must be > 0");
  const double theta = 2.0 * std::numbers::pi * std::log(t) / s.log_beta;
  double sum = 1.0;
  for (const auto& m : s.modes) sum += m.c * std::cos(m.k * theta - m.d);
  return sum;
}

// The same bracket from the complex sum over k in Z \ {0}, |k| <= modes,
// using Gamma at both chi_k and chi_{-k}.
inline Complex oscillation_bracket_complex(const ModelParams& p, double t, int modes_max) {
  if (!(t > 0.0)) throw DomainError("oscillation bracket: t must be > 0");
  const double g_rho = std::tgamma(p.rho());
  Complex sum = 1.0;
  for (int k = -modes_max; k <= modes_max; ++k) {
    if (k == 0) continue;
    const double omega = 2.0 * std::numbers::pi * k / p.log_beta();
    sum += complex_gamma(chi(p, k)) / g_rho * std::polar(1.0, -omega * std::log(t));
  }
  return sum;
}

inline double g_eval(const OscillationSpectrum& s, double t) {
  if (!(t > 0.0)) throw DomainError("g_eval: t must be > 0");
  return s.prefactor * oscillation_bracket(s, t);
}

inline double g_eval(const ModelParams& p, double t, int modes_max = kDefaultModes) {
  return g_eval(oscillation_spectrum(p, modes_max), t);
}

struct SeriesValue {
  double value = 0.0;
  double bound = 0.0;  // bound on |value - f(t)|
};

namespace detail {

// f at t = exp(log_t); log_t = -inf gives f(0) = 1.
inline SeriesValue f_series_log(const ModelParams& p, double log_t, double eps) {
  const double a = p.alpha();
  const double k_min = std::ceil(std::log(eps) / p.log_alpha());
  constexpr long kMaxTerms = 100'000'000;
  CompensatedSum sum;
  double weight = 1.0 - a;  // (1-a) a^k
  double rest = 1.0;        // a^{k+1} after the loop body
  for (long k = 0;; ++k) {
    sum += weight * std::exp(-std::exp(log_t - static_cast<double>(k) * p.log_beta()));
    rest *= a;
    weight *= a;
    if (static_cast<double>(k) >= k_min && rest <= eps * sum.value()) break;
    if (k >= kMaxTerms) throw IterationLimitError("f_series: too many terms");
  }
  const double v = sum.value();
  return {v, rest + 4.0 * std::numeric_limits<double>::epsilon() * v};
}

}  // namespace detail

// Partial sum of f. Summation runs at least to ceil(ln eps / ln a) and then on
// until the geometric remainder a^{K+1} is below eps relative to the sum.
inline SeriesValue f_series(const ModelParams& p, double t, double eps = 1e-16) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("f_series: t must be finite and >= 0");
  if (!(eps > 0.0)) throw DomainError("f_series: eps must be > 0");
  return detail::f_series_log(p, std::log(t), eps);
}

inline double f_asymptotic(const OscillationSpectrum& s, double t, double regime_guard = kDefaultRegimeGuard) {
  if (!(t >= regime_guard)) throw DomainError("f_asymptotic: t below the asymptotic regime guard");
  return s.power_prefactor * std::pow(t, -s.rho) * oscillation_bracket(s, t);
}

inline double f_asymptotic(const ModelParams& p, double t, int modes_max = kDefaultModes,
                           double regime_guard = kDefaultRegimeGuard) {
  return f_asymptotic(oscillation_spectrum(p, modes_max), t, regime_guard);
}

// Bound on the contribution of the modes beyond those held in s, taken as
// twice the first omitted amplitude (the c_k decay super-exponentially).
inline double mode_truncation_bound(const ModelParams& p, const OscillationSpectrum& s, double t) {
  const int next = static_cast<int>(s.modes.size()) + 1;
  const double c_next = 2.0 * std::exp(log_complex_gamma(chi(p, next)).real() - std::lgamma(s.rho));
  return 2.0 * c_next * s.power_prefactor * std::pow(t, -s.rho);
}

struct MellinValue {
  Complex value;
  bool in_strip = false;  // 0 < re z < rho, where the integral representation holds
};

// 1 - a b^z = -expm1(ln b (z - rho)), evaluated without cancellation near the poles.
inline Complex mellin_denominator(const ModelParams& p, Complex z) {
  const Complex w = p.log_beta() * (z - p.rho());
  const double half = std::sin(0.5 * w.imag());
  const Complex em1(std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * half * half,
                    std::exp(w.real()) * std::sin(w.imag()));
  return -em1;
}

inline MellinValue mellin_f_star(const ModelParams& p, Complex z) {
  const double k = std::round(z.imag() * p.log_beta() / (2.0 * std::numbers::pi));
  const Complex pole = chi(p, static_cast<int>(k));
  if (std::abs(z - pole) <= 1e-13 * std::max(1.0, std::abs(pole))) {
    throw PoleError("mellin_f_star: z is a pole chi_k");
  }
  const Complex g = complex_gamma(z);  // PoleError at nonpositive integers
  const Complex v = g * (1.0 - p.alpha()) / mellin_denominator(p, z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw OverflowError("mellin_f_star: not finite");
  return {v, z.real() > 0.0 && z.real() < p.rho()};
}

inline Complex residue_at_chi(const ModelParams& p, int k) {
  return -(1.0 - p.alpha()) * complex_gamma(chi(p, k)) / p.log_beta();
}

inline double theorem_argument_scale(double beta) { return (beta - 1.0) * (beta - 1.0) / (2.0 * beta); }

inline double theorem_ratio(const OscillationSpectrum& s, double t, double tail_value) {
  if (!(t > 0.0)) throw DomainError("theorem_ratio: t must be > 0");
  if (!(tail_value > 0.0 && tail_value <= 1.0)) throw DomainError("theorem_ratio: tail value must lie in (0, 1]");
  return std::pow(t, s.rho) * tail_value / g_eval(s, theorem_argument_scale(s.beta) * t);
}

inline double theorem_ratio(const ModelParams& p, double t, double tail_value, int modes_max = kDefaultModes) {
  return theorem_ratio(oscillation_spectrum(p, modes_max), t, tail_value);
}

struct SandwichConstants {
  double lower = 0.0;  // C1 = (1-a) e^{-1} b^{-rho}
  double upper = 0.0;  // C2 = a^{-1} sum_{k in Z} (1-a) a^k exp(-b^{-k})
};

inline SandwichConstants sandwich_constants(const ModelParams& p) {
  const double a = p.alpha();
  SandwichConstants c;
  c.lower = (1.0 - a) * std::exp(-1.0) * std::exp(-p.rho() * p.log_beta());
  CompensatedSum sum;
  constexpr double kRel = 1e-18;
  // k >= 0: terms shrink geometrically once a^k dominates.
  for (long k = 0;; ++k) {
    const double term = (1.0 - a) * std::exp(k * p.log_alpha() - std::exp(-k * p.log_beta()));
    sum += term;
    if (term <= kRel * sum.value() && k > 0) break;
    if (k > 100'000'000) throw IterationLimitError("sandwich_constants: series did not converge");
  }
  // k < 0: a^{-j} grows but exp(-b^j) kills it doubly exponentially.
  for (long j = 1;; ++j) {
    const double e = std::exp(j * p.log_beta());
    const double term = (1.0 - a) * std::exp(-j * p.log_alpha() - e);
    sum += term;
    if (term <= kRel * sum.value() && e > -j * p.log_alpha()) break;
    if (j > 100'000'000) throw IterationLimitError("sandwich_constants: series did not converge");
  }
  c.upper = sum.value() / a;
  return c;
}

struct QuadratureValue {
  double value = 0.0;
  double error = 0.0;  // quadrature estimate plus the two analytic tail bounds
};

// int_0^inf t^{z-1} f(t) dt for real z in (0, rho), integrated in u = ln t.
// The left tail uses 1 - m t <= f(t) <= 1 with m = (1-a)/(1-a/b); the right
// tail is bounded by f(t) <= C2 t^{-rho}.
inline QuadratureValue mellin_quadrature(const ModelParams& p, double z, double tail_tol = 1e-12) {
  if (!(z > 0.0 && z < p.rho())) throw DomainError("mellin_quadrature: z must lie in the fundamental strip");
  const double a = p.alpha();
  const double m = (1.0 - a) / (1.0 - a / p.beta());
  const double c2 = sandwich_constants(p).upper;
  // Left: remainder m e^{u(z+1)}/(z+1) <= tail_tol.
  const double u_lo = std::min(-1.0, std::log(tail_tol * (z + 1.0) / m) / (z + 1.0));
  // Right: C2 e^{-(rho-z)u}/(rho-z) <= tail_tol.
  const double gap = p.rho() - z;
  const double u_hi = std::max(1.0, -std::log(tail_tol * gap / c2) / gap);
  auto integrand = [&](double u) { return std::exp(u * z) * detail::f_series_log(p, u, 1e-17).value; };
  CompensatedSum total;
  double err = 0.0;
  const double step = p.log_beta();
  for (double lo = u_lo; lo < u_hi; lo += step) {
    const double hi = std::min(u_hi, lo + step);
    double e = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 6, 1e-11, &e);
    err += e;
  }
  total += std::exp(u_lo * z) / z - m * std::exp(u_lo * (z + 1.0)) / (z + 1.0);
  err += m * std::exp(u_lo * (z + 1.0)) / (z + 1.0) + c2 * std::exp(-gap * u_hi) / gap;
  return {total.value(), err};
}

}  // namespace traptail
