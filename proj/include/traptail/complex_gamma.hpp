#pragma once

// Euler's Gamma function on the complex plane via the Lanczos approximation
// (g = 7, 9 coefficients), evaluated in log space, with reflection for
// re(z) < 1/2.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "traptail/errors.hpp"

namespace traptail {

using Complex = std::complex<double>;

namespace detail {

inline constexpr double kLanczosG = 7.0;
// Standard g = 7, n = 9 coefficient set (as in Numerical Recipes / Godfrey).
inline constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// log Gamma for re(z) >= 1/2.
inline Complex log_gamma_right(Complex z) {
  z -= 1.0;
  Complex a = kLanczosCoeff[0];
  for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) a += kLanczosCoeff[i] / (z + static_cast<double>(i));
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace detail

// A branch of log Gamma(z); exp of it is Gamma(z). The imaginary part is not
// reduced to the principal branch.
inline Complex log_complex_gamma(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("complex_gamma: non-finite argument");
  if (detail::is_nonpositive_integer(z)) throw PoleError("complex_gamma: pole at nonpositive integer");
  if (z.real() < 0.5) {
    const Complex s = std::sin(std::numbers::pi * z);
    return std::log(std::numbers::pi) - std::log(s) - detail::log_gamma_right(1.0 - z);
  }
  return detail::log_gamma_right(z);
}

inline Complex complex_gamma(Complex z) {
  const Complex g = std::exp(log_complex_gamma(z));
  if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) throw OverflowError("complex_gamma: result not finite");
  return g;
}

}  // namespace traptail
