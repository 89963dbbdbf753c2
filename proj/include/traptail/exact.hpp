#pragma once

// Exact law of the excursion length T for a fixed trap size, and its
// geometric mixture over k.
//
// The fixed-k law comes from a forward recursion on the not-yet-returned
// mass over the states {1, ..., k}; survival is propagated directly instead of
// differencing a CDF, so tails far below 1e-12 keep full relative precision.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "traptail/errors.hpp"
#include "traptail/model.hpp"
#include "traptail/numeric.hpp"
#include "traptail/tail_table.hpp"

namespace traptail {

inline constexpr int kMaxTrapStates = 1 << 22;

struct FixedKDistribution {
  int k = 0;
  double beta = 2.0;
  std::vector<double> pmf;       // P_k[T = t], t = 0..t_max
  std::vector<double> survival;  // P_k[T > t], t = 0..t_max
  double remainder = 0.0;        // P_k[T > t_max]

  long t_max() const noexcept { return static_cast<long>(pmf.size()) - 1; }
};

inline FixedKDistribution fixed_k_return_distribution(double beta, int k, long t_max) {
  detail::require_beta(beta, "fixed_k_return_distribution");
  detail::require_trap(k, 0, "fixed_k_return_distribution");
  if (t_max < 2) throw DomainError("fixed_k_return_distribution: t_max must be >= 2");
  if (k > kMaxTrapStates) throw OverflowError("fixed_k_return_distribution: trap too large for the state vector");

  FixedKDistribution out;
  out.k = k;
  out.beta = beta;
  const auto n = static_cast<std::size_t>(t_max) + 1;
  out.pmf.assign(n, 0.0);
  out.survival.assign(n, 0.0);
  if (k == 0) {
    out.pmf[0] = 1.0;
    return out;
  }

  // up + down == 1 exactly in binary, so the kernel itself conserves mass.
  const double up = 1.0 - 1.0 / (1.0 + beta);
  const double down = 1.0 - up;

  // Index 0 and k+1 are permanently zero guards.
  std::vector<double> cur(static_cast<std::size_t>(k) + 2, 0.0);
  std::vector<double> next(cur.size(), 0.0);
  out.survival[0] = 1.0;
  cur[1] = 1.0;  // reflection at 0: the first step is forced
  out.survival[1] = 1.0;

  for (long t = 2; t <= t_max; ++t) {
    const int reach = static_cast<int>(std::min<long>(k, t));
    double returned;
    if (k == 1) {
      returned = cur[1];
      next[1] = 0.0;
    } else {
      returned = cur[1] * down;
      for (int l = 1; l <= reach; ++l) {
        double in = 0.0;
        if (l >= 2) in += cur[l - 1] * up;
        if (l + 1 < k) {
          in += cur[l + 1] * down;
        } else if (l + 1 == k) {
          in += cur[k];  // reflection at k
        }
        next[static_cast<std::size_t>(l)] = in;
      }
    }
    double mass = 0.0;
    for (int l = 1; l <= reach; ++l) mass += next[static_cast<std::size_t>(l)];
    out.pmf[static_cast<std::size_t>(t)] = returned;
    out.survival[static_cast<std::size_t>(t)] = mass;
    std::swap(cur, next);
    if (mass == 0.0) break;  // everything returned (or underflowed); rest stays zero
  }
  out.remainder = out.survival.back();
  return out;
}

// k_max such that the omitted geometric mass alpha^{k_max+1} <= eps.
inline int mixture_truncation_index(const ModelParams& p, double eps) {
  if (!(eps > 0.0)) throw DomainError("mixture: eps must be > 0");
  if (eps >= 1.0) return 0;
  const double k = std::ceil(std::log(eps) / p.log_alpha());
  if (k > kMaxTrapStates) throw OverflowError("mixture: truncation index too large");
  return static_cast<int>(k);
}

// P[T > t] = sum_k (1-alpha) alpha^k P_k[T > t] on the given grid, truncated
// at k_max. Per-k laws run on `workers` threads; the reduction is always in
// ascending k, so the result does not depend on the worker count.
inline TailTable mixture_tail(const ModelParams& p, const std::vector<double>& t_grid, double eps,
                              unsigned workers = 1) {
  if (t_grid.empty()) throw EmptyInputError("mixture_tail: empty grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) throw DomainError("mixture_tail: grid times must be >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("mixture_tail: grid must be ascending");
  }
  const int k_max = mixture_truncation_index(p, eps);
  const long horizon = std::max<long>(2, static_cast<long>(std::floor(t_grid.back())));

  // per_k[k-1][i] = P_k[T > floor(t_i)]
  std::vector<std::vector<double>> per_k(static_cast<std::size_t>(k_max));
  parallel_for(per_k.size(), workers, [&](std::size_t idx) {
    const int k = static_cast<int>(idx) + 1;
    const auto dist = fixed_k_return_distribution(p.beta(), k, horizon);
    auto& row = per_k[idx];
    row.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      row[i] = dist.survival[static_cast<std::size_t>(std::floor(t_grid[i]))];
    }
  });

  TailTable table;
  table.t_grid = t_grid;
  table.provenance = Provenance::Exact;
  table.survival.assign(t_grid.size(), 0.0);
  table.truncation_bound = std::exp(static_cast<double>(k_max + 1) * p.log_alpha());
  std::vector<CompensatedSum> acc(t_grid.size());
  // k = 0 is the atom T = 0 and contributes nothing for t >= 0.
  for (int k = 1; k <= k_max; ++k) {
    const double w = (1.0 - p.alpha()) * std::exp(static_cast<double>(k) * p.log_alpha());
    const auto& row = per_k[static_cast<std::size_t>(k - 1)];
    for (std::size_t i = 0; i < t_grid.size(); ++i) acc[i].add(w * row[i]);
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double s = acc[i].value();
    // Compensated sums of a nonincreasing family can still wobble by one ulp.
    if (i > 0 && s > table.survival[i - 1]) s = table.survival[i - 1];
    table.survival[i] = std::clamp(s, 0.0, 1.0);
  }
  return table;
}

// P[N > t] from the law of N: given A and k it is geometric on {0, 1, ...}
// with success probability (beta-1)/(beta^k-1). Traps beyond k_max are
// bounded by their mass alpha^{k_max+1}.
struct CountTail {
  double value = 0.0;
  double bound = 0.0;
};

inline CountTail count_tail(const ModelParams& p, double t, double eps = 1e-15) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("count_tail: t must be finite and >= 0");
  const int k_max = mixture_truncation_index(p, eps);
  const double n = std::floor(t) + 1.0;
  CompensatedSum sum;
  for (int k = 2; k <= k_max; ++k) {
    const double w = (1.0 - p.alpha()) * std::exp(static_cast<double>(k) * p.log_alpha());
    const double q = excursion_escape_prob(p.beta(), k);
    sum += w * reach_far_end_prob(p.beta(), k) * std::exp(n * std::log1p(-q));
  }
  return {sum.value(), std::exp(static_cast<double>(k_max + 1) * p.log_alpha())};
}

struct MomentEstimate {
  double value = 0.0;            // resolved + tail_estimate
  double bound = 0.0;            // bound on |value - true moment|
  double resolved = 0.0;         // contribution of t <= horizon
  double tail_estimate = 0.0;    // extrapolated contribution of t > horizon
  double unresolved_mass = 0.0;  // P[T > horizon]
};

namespace detail {

// E[(t0 + 2J)^order] with J geometric on {1, 2, ...} with success prob h.
inline double geometric_tail_moment(double t0, double h, int order) {
  if (order == 1) return t0 + 2.0 / h;
  return t0 * t0 + 4.0 * t0 / h + 4.0 * (2.0 - h) / (h * h);
}

inline void require_order(int order) {
  if (order != 1 && order != 2) throw DomainError("truncated_moment: order must be 1 or 2");
}

}  // namespace detail

// sum_t t^order P_k[T = t], plus an extrapolation of the unresolved mass.
// Past the horizon the law is geometric in steps of two with the limiting
// hazard of the quasi-stationary regime. That hazard is estimated by Aitken
// extrapolation of the hazards at three consecutive even times; twice the
// distance between the extrapolated and the last observed hazard feeds the
// bound. When the hazard drift is not contracting the bound is infinite.
// The extrapolation is anchored at the last even time whose survival is still
// a normal double, so subnormal remainders do not poison the hazards.
inline MomentEstimate truncated_moment(const FixedKDistribution& dist, int order) {
  detail::require_order(order);
  constexpr double u = std::numeric_limits<double>::epsilon() / 2.0;
  constexpr double kAnchorFloor = 1e-280;
  const auto power = [order](long t) {
    const double x = static_cast<double>(t);
    return order == 1 ? x : x * x;
  };
  MomentEstimate m;
  m.unresolved_mass = dist.remainder;
  long te = dist.t_max();
  if (dist.remainder > 0.0) {
    te -= te % 2;
    while (te >= 8 && dist.survival[static_cast<std::size_t>(te - 6)] < kAnchorFloor) te -= 2;
  }
  CompensatedSum resolved;
  CompensatedSum weighted;  // sum (t+1) t^order pmf, for the rounding bound
  for (long t = 0; t <= te; ++t) {
    const double p = dist.pmf[static_cast<std::size_t>(t)];
    resolved.add(power(t) * p);
    weighted.add((static_cast<double>(t) + 1.0) * power(t) * p);
  }
  m.resolved = resolved.value();
  m.value = m.resolved;
  double rounding = 4.0 * u * weighted.value();
  m.bound = rounding;
  if (dist.remainder == 0.0) return m;
  m.bound = std::numeric_limits<double>::infinity();
  if (te < 8) return m;

  const double mass = dist.survival[static_cast<std::size_t>(te)];
  const auto hazard = [&](long t) {
    return dist.pmf[static_cast<std::size_t>(t)] / dist.survival[static_cast<std::size_t>(t - 2)];
  };
  const double h2 = hazard(te), h1 = hazard(te - 2), h0 = hazard(te - 4);
  if (!(h2 > 0.0 && h1 > 0.0 && h0 > 0.0)) return m;
  const auto tail_at = [&](double h) {
    return mass * detail::geometric_tail_moment(static_cast<double>(te), h, order);
  };
  const double tail_last = tail_at(h2);
  // Without a usable extrapolation the last hazard still gives the value.
  m.tail_estimate = tail_last;
  m.value = m.resolved + tail_last;
  // Hazard drift below the rounding level of the recursion counts as converged.
  const double noise = 64.0 * u * static_cast<double>(te) * h2;
  const double d1 = h2 - h1, d0 = h1 - h0;
  double h_inf = h2;
  if (std::abs(d1) > noise || std::abs(d0) > noise) {
    if (d0 == 0.0) return m;
    const double ratio = d1 / d0;
    if (!(std::abs(ratio) < 0.999)) return m;
    h_inf = h2 + d1 * ratio / (1.0 - ratio);
    if (!(h_inf > 0.0 && h_inf <= 1.0)) return m;
  }
  const double tail = tail_at(h_inf);
  const double spread = std::abs(tail_at(std::max(h_inf - noise, 0.5 * h_inf)) - tail);
  m.tail_estimate = tail;
  m.value = m.resolved + tail;
  rounding += 4.0 * u * (static_cast<double>(te) + 1.0) * tail;
  m.bound = rounding + 2.0 * std::abs(tail - tail_last) + spread;
  return m;
}

// Abel summation E[T] = sum_t P[T > t] (order 1) or E[T^2] = sum_t (2t+1)
// P[T > t] (order 2) over a unit-spaced grid starting at 0. Nothing is
// assumed about the law past the last grid point, so any surviving mass makes
// the bound infinite; `value` is then a lower bound.
inline MomentEstimate truncated_moment(const TailTable& table, int order) {
  detail::require_order(order);
  if (table.size() == 0) throw EmptyInputError("truncated_moment: empty table");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.t_grid[i] != static_cast<double>(i)) {
      throw DomainError("truncated_moment: Abel summation needs the grid 0, 1, 2, ...");
    }
  }
  CompensatedSum acc;
  double weight_total = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double w = order == 1 ? 1.0 : 2.0 * static_cast<double>(i) + 1.0;
    acc.add(w * table.survival[i]);
    weight_total += w;
  }
  MomentEstimate m;
  m.resolved = acc.value();
  m.value = m.resolved;
  m.unresolved_mass = table.survival.back();
  const double systematic = table.provenance == Provenance::Exact ? table.truncation_bound.value_or(0.0) : 0.0;
  m.bound = m.unresolved_mass > 0.0 ? std::numeric_limits<double>::infinity()
                                     : systematic * weight_total;
  return m;
}

struct MixtureMoment {
  MomentEstimate estimate;
  int k_max = 0;
};

// E[T^order] under the geometric mixture from per-k truncated moments.
// Infinite when rho <= order. Traps beyond k_max are accounted for by the
// geometric growth ratio alpha beta^order of their contributions.
inline std::variant<MixtureMoment, Infinite> mixture_moment(const ModelParams& p, int order, long horizon,
                                                            double eps, unsigned workers = 1) {
  detail::require_order(order);
  if (p.rho() <= static_cast<double>(order)) return Infinite{};
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("mixture_moment: eps must lie in (0, 1)");
  const double q = std::exp(p.log_alpha() + order * p.log_beta());  // alpha beta^order < 1
  const double k_needed = std::max(std::ceil(std::log(eps) / p.log_alpha()), std::ceil(std::log(eps) / std::log(q)));
  if (k_needed > 5000.0) throw OverflowError("mixture_moment: too many trap sizes for the requested eps");
  const int k_max = static_cast<int>(k_needed);

  std::vector<MomentEstimate> per_k(static_cast<std::size_t>(k_max));
  parallel_for(per_k.size(), workers, [&](std::size_t idx) {
    const int k = static_cast<int>(idx) + 1;
    per_k[idx] = truncated_moment(fixed_k_return_distribution(p.beta(), k, horizon), order);
  });

  MixtureMoment out;
  out.k_max = k_max;
  CompensatedSum value, resolved, tail, bound, mass;
  for (int k = 1; k <= k_max; ++k) {
    const double w = (1.0 - p.alpha()) * std::exp(static_cast<double>(k) * p.log_alpha());
    const auto& m = per_k[static_cast<std::size_t>(k - 1)];
    value.add(w * m.value);
    resolved.add(w * m.resolved);
    tail.add(w * m.tail_estimate);
    bound.add(w * m.bound);
    mass.add(w * m.unresolved_mass);
  }
  const double last = (1.0 - p.alpha()) * std::exp(static_cast<double>(k_max) * p.log_alpha()) *
                      per_k.back().value;
  const double omitted = last * q / (1.0 - q);
  out.estimate.value = value.value() + omitted;
  out.estimate.resolved = resolved.value();
  out.estimate.tail_estimate = tail.value() + omitted;
  out.estimate.unresolved_mass = mass.value() + std::exp(static_cast<double>(k_max + 1) * p.log_alpha());
  out.estimate.bound = bound.value() + omitted;
  return out;
}

}  // namespace traptail
