#pragma once

// Interval estimates and goodness-of-fit helpers used by the simulation
// checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "traptail/errors.hpp"

namespace traptail {

struct Interval {
  double lower;
  double upper;
  double halfwidth() const noexcept { return 0.5 * (upper - lower); }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

// Two-sided normal quantile for the given coverage, e.g. 0.95 -> 1.959964.
inline double normal_quantile(double coverage) {
  if (!(coverage > 0.0 && coverage < 1.0)) throw DomainError("normal_quantile: coverage must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * coverage);
}

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
  if (trials == 0) throw EmptyInputError("wilson_interval: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - spread), std::min(1.0, centre + spread)};
}

// Sample mean / variance with standard errors, from raw values.
struct SampleMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double mean_se = 0.0;
  double variance_se = 0.0;  // sqrt((m4 - s^4)/n), large-sample
};

inline SampleMoments sample_moments(std::span<const double> xs) {
  if (xs.empty()) throw EmptyInputError("sample_moments: no values");
  SampleMoments m;
  m.n = xs.size();
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(m.n);
  m.variance = m.n > 1 ? m2 / (n - 1.0) : 0.0;
  m.mean_se = std::sqrt(m.variance / n);
  const double pop_var = m2 / n;
  m.variance_se = std::sqrt(std::max(0.0, m4 / n - pop_var * pop_var) / n);
  return m;
}

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

// Pearson test of observed counts against expected probabilities. Adjacent
// cells are pooled from the right until each expected count is >= min_expected.
inline ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> probs,
                                       double min_expected = 5.0) {
  if (observed.size() != probs.size() || observed.empty()) throw DomainError("chi_square_test: size mismatch");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  if (total == 0.0) throw EmptyInputError("chi_square_test: no observations");
  std::vector<double> obs, expd;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += static_cast<double>(observed[i]);
    e_acc += probs[i] * total;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      expd.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (expd.empty()) {
      obs.push_back(o_acc);
      expd.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      expd.back() += e_acc;
    }
  }
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - expd[i];
    r.statistic += d * d / expd[i];
  }
  r.degrees_of_freedom = static_cast<int>(obs.size()) - 1;
  if (r.degrees_of_freedom < 1) {
    r.p_value = 1.0;
    return r;
  }
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.degrees_of_freedom), r.statistic));
  return r;
}

}  // namespace traptail
