#pragma once

// Closed-form quantities of the biased walk on {0,...,k} with reflection at
// both ends: up-probability beta/(1+beta) in the interior, trap size k drawn
// geometrically with P[k = n] = (1-alpha) alpha^n.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "traptail/errors.hpp"

namespace traptail {

namespace detail {

inline void require_beta(double beta, const char* where) {
  if (!std::isfinite(beta) || !(beta > 1.0)) {
    throw DomainError(std::string(where) + ": beta must be a finite number > 1");
  }
}

inline void require_trap(int k, int min_k, const char* where) {
  if (k < min_k) {
    throw DomainError(std::string(where) + ": trap size k must be >= " + std::to_string(min_k));
  }
}

// beta^n - 1 without cancellation for beta near 1; throws past double range.
inline double pow_minus_one(double beta, double n, const char* where) {
  const double x = n * std::log(beta);
  if (x > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError(std::string(where) + ": beta^k overflows double precision");
  }
  return std::expm1(x);
}

// 1 - beta^{-n} for n >= 0, never overflows.
inline double one_minus_inv_pow(double beta, double n) { return -std::expm1(-n * std::log(beta)); }

}  // namespace detail

// (alpha, beta) with the tail exponent rho = -ln(alpha)/ln(beta) fixed at
// construction. Every module reads rho() from here; nothing recomputes it.
class ModelParams {
 public:
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double rho() const noexcept { return rho_; }
  double log_alpha() const noexcept { return log_alpha_; }
  double log_beta() const noexcept { return log_beta_; }

  friend ModelParams make_params(double alpha, double beta);

 private:
  ModelParams(double alpha, double beta)
      : alpha_(alpha),
        beta_(beta),
        log_alpha_(std::log(alpha)),
        log_beta_(std::log(beta)),
        rho_(-log_alpha_ / log_beta_) {}

  double alpha_;
  double beta_;
  double log_alpha_;
  double log_beta_;
  double rho_;
};

inline ModelParams make_params(double alpha, double beta) {
  if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("make_params: alpha must lie in (0, 1)");
  }
  detail::require_beta(beta, "make_params");
  return ModelParams(alpha, beta);
}

// Free: walk on Z drifting right (conductances beta^l).
// FreeReversed: its mirror image, drifting left.
// ConditionedToZero: h-transform with h(l) = beta^{-l} - beta^{-k}; the walk
//   forced back to 0 before touching k.
// ConditionedToK: h-transform with h(l) = 1 - beta^{-l}; the walk forced back
//   to k before touching 0.
enum class WalkKind { Free, FreeReversed, ConditionedToZero, ConditionedToK };

inline const char* to_string(WalkKind kind) {
  switch (kind) {
    case WalkKind::Free: return "free";
    case WalkKind::FreeReversed: return "free-reversed";
    case WalkKind::ConditionedToZero: return "conditioned-to-zero";
    case WalkKind::ConditionedToK: return "conditioned-to-k";
  }
  return "?";
}

struct Infinite {
  friend bool operator==(Infinite, Infinite) = default;
};

// A moment is either a finite value or explicitly infinite.
using Moment = std::variant<double, Infinite>;

inline bool is_finite(const Moment& m) { return std::holds_alternative<double>(m); }

struct ExcursionMoments {
  Moment mean;
  bool second_moment_finite;
};

// E_k[T] = 2 (beta^k - 1) / (beta - 1).
inline double expected_excursion_fixed(double beta, int k) {
  detail::require_beta(beta, "expected_excursion_fixed");
  detail::require_trap(k, 0, "expected_excursion_fixed");
  if (k == 0) return 0.0;
  const double value = 2.0 * detail::pow_minus_one(beta, k, "expected_excursion_fixed") / (beta - 1.0);
  if (!std::isfinite(value)) throw OverflowError("expected_excursion_fixed: result overflows");
  return value;
}

// Mixed over k: 2 alpha / (1 - alpha beta) when rho > 1, infinite otherwise.
// The second moment is finite iff rho > 2.
inline ExcursionMoments expected_excursion(const ModelParams& p) {
  ExcursionMoments out{Infinite{}, p.rho() > 2.0};
  if (p.rho() > 1.0) out.mean = 2.0 * p.alpha() / (1.0 - p.alpha() * p.beta());
  return out;
}

// P_k[A]: probability to reach k before returning to 0.
inline double reach_far_end_prob(double beta, int k) {
  detail::require_beta(beta, "reach_far_end_prob");
  detail::require_trap(k, 1, "reach_far_end_prob");
  if (k == 1) return 1.0;
  return (beta - 1.0) / (beta * detail::one_minus_inv_pow(beta, k));
}

// P_k[B^c] = (beta-1)/(beta^k-1): an excursion from k reaches 0 before
// returning to k. This is the success parameter of N given A.
inline double excursion_escape_prob(double beta, int k) {
  detail::require_beta(beta, "excursion_escape_prob");
  detail::require_trap(k, 1, "excursion_escape_prob");
  if (k == 1) return 1.0;
  const double inv = std::exp(-static_cast<double>(k) * std::log(beta));
  return (beta - 1.0) * inv / detail::one_minus_inv_pow(beta, k);
}

// P_k[B]: an excursion started at k returns to k before hitting 0.
inline double return_before_zero_prob(double beta, int k) {
  detail::require_beta(beta, "return_before_zero_prob");
  detail::require_trap(k, 1, "return_before_zero_prob");
  return 1.0 - excursion_escape_prob(beta, k);
}

// E_k[N | A] = (beta^k - beta)/(beta - 1) for a fixed k, or the geometric
// mixture alpha^2 beta / (1 - alpha beta) (infinite if alpha beta >= 1).
inline Moment excursion_count_mean(const ModelParams& p, std::optional<int> k = std::nullopt) {
  if (k) {
    detail::require_trap(*k, 1, "excursion_count_mean");
    if (*k == 1) return 0.0;
    const double b = p.beta();
    const double value = b * detail::pow_minus_one(b, *k - 1, "excursion_count_mean") / (b - 1.0);
    if (!std::isfinite(value)) throw OverflowError("excursion_count_mean: result overflows");
    return value;
  }
  const double ab = p.alpha() * p.beta();
  if (ab >= 1.0) return Infinite{};
  return p.alpha() * p.alpha() * p.beta() / (1.0 - ab);
}

// Return time of the free walk started with one step away from 0, i.e.
// T^{Ycheck} given Ycheck_1 = 1. Its moment generating function is
//   E[e^{lambda T}] = (beta + 1 - sqrt((beta+1)^2 - 4 beta e^{2 lambda})) / 2
// for lambda <= ln((beta+1)/(2 sqrt(beta))); the edge itself is included.
class FreeWalkReturnTime {
 public:
  explicit FreeWalkReturnTime(double beta) : beta_(beta) {
    detail::require_beta(beta, "FreeWalkReturnTime");
  }

  double beta() const noexcept { return beta_; }

  double lambda_max() const { return std::log((beta_ + 1.0) / (2.0 * std::sqrt(beta_))); }

  double mgf(double lambda) const {
    if (!std::isfinite(lambda) && lambda > 0) throw DomainError("free_walk_return_mgf: lambda is +inf");
    if (lambda > lambda_max()) {
      throw DomainError("free_walk_return_mgf: lambda beyond radius of convergence");
    }
    if (lambda == -std::numeric_limits<double>::infinity()) return 0.0;
    // (beta+1)^2 - 4 beta e^{2 lambda}, arranged to stay exact near lambda = 0.
    double disc = (beta_ - 1.0) * (beta_ - 1.0) - 4.0 * beta_ * std::expm1(2.0 * lambda);
    if (disc < 0.0) disc = 0.0;  // rounding at the included boundary only
    return 0.5 * (beta_ + 1.0 - std::sqrt(disc));
  }

  double mean() const { return 2.0 * beta_ / (beta_ - 1.0); }

  double variance() const {
    const double d = beta_ - 1.0;
    return 4.0 * beta_ * (beta_ + 1.0) / (d * d * d);
  }

 private:
  double beta_;
};

inline double free_walk_return_mgf(double beta, double lambda) {
  return FreeWalkReturnTime(beta).mgf(lambda);
}

// One-step probability of moving l -> l+1.
// Free kinds ignore k and l. Conditioned kinds require 1 <= l <= k-1.
inline double conditioned_up_prob(WalkKind kind, double beta, int k, int l) {
  detail::require_beta(beta, "conditioned_up_prob");
  switch (kind) {
    case WalkKind::Free: return beta / (1.0 + beta);
    case WalkKind::FreeReversed: return 1.0 / (1.0 + beta);
    case WalkKind::ConditionedToZero:
    case WalkKind::ConditionedToK: break;
  }
  detail::require_trap(k, 1, "conditioned_up_prob");
  if (l < 1 || l > k - 1) {
    throw DomainError("conditioned_up_prob: site l must lie in {1, ..., k-1}");
  }
  const double lb = std::log(beta);
  double p;
  if (kind == WalkKind::ConditionedToZero) {
    // (1/(beta+1)) (1 - (beta-1)/(beta^m - 1)) with m = k - l,
    // rewritten as (1 - beta^{1-m}) / (1 - beta^{-m}) / (beta + 1).
    const double m = static_cast<double>(k - l);
    p = std::expm1(-(m - 1.0) * lb) / std::expm1(-m * lb) / (beta + 1.0);
  } else {
    if (l == 1) return 1.0;
    // (beta/(beta+1)) (beta^{l+1} - 1)/(beta^{l+1} - beta)
    //   = (beta/(beta+1)) (1 - beta^{-(l+1)}) / (1 - beta^{-l})
    const double n = static_cast<double>(l);
    p = beta / (beta + 1.0) * (std::expm1(-(n + 1.0) * lb) / std::expm1(-n * lb));
  }
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

// Bounds on the conditioned excursion length T^(1) from k back to k (k >= 2):
//   2b/(b-1) - 2b(b+1)/(b-1) k b^{-k} <= E_k[T^(1)] <= 2b/(b-1)
//   Var_k[T^(1)] <= 4b(b+1)/(b-1)^3
//   E_k[exp(lambda (T^(1) - E T^(1)))] <= 1 + 4b(b^2+1)/(b-1)^3 lambda^2  (small |lambda|)
struct ExcursionLengthBounds {
  double mean_lower;
  double mean_upper;
  double variance_upper;
  double mgf_curvature;  // coefficient of lambda^2
};

inline ExcursionLengthBounds conditioned_excursion_bounds(double beta, int k) {
  detail::require_beta(beta, "conditioned_excursion_bounds");
  detail::require_trap(k, 2, "conditioned_excursion_bounds");
  const double d = beta - 1.0;
  const double upper = 2.0 * beta / d;
  const double lower =
      upper - 2.0 * beta * (beta + 1.0) / d * static_cast<double>(k) * std::exp(-k * std::log(beta));
  return {lower, upper, 4.0 * beta * (beta + 1.0) / (d * d * d),
          4.0 * beta * (beta * beta + 1.0) / (d * d * d)};
}

// E_k[T_out | A] <= k (beta+1)/(beta-1).
inline double final_descent_mean_bound(double beta, int k) {
  detail::require_beta(beta, "final_descent_mean_bound");
  detail::require_trap(k, 1, "final_descent_mean_bound");
  return static_cast<double>(k) * (beta + 1.0) / (beta - 1.0);
}

}  // namespace traptail
