#pragma once

// Time grids. The textual form is `log:<t_min>:<t_max>:<points-per-period>`
// where a period is one multiplicative factor of beta, so the log-periodic
// oscillation is sampled at a fixed phase resolution.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "traptail/errors.hpp"

namespace traptail {

struct LogGridSpec {
  double t_min = 1.0;
  double t_max = 1e5;
  int points_per_period = 32;
};

inline void validate(const LogGridSpec& g) {
  if (!std::isfinite(g.t_min) || !std::isfinite(g.t_max)) throw DomainError("grid: bounds must be finite");
  if (g.t_min < 1.0) throw DomainError("grid: t_min must be >= 1");
  if (!(g.t_max > g.t_min)) throw DomainError("grid: t_max must exceed t_min");
  if (g.points_per_period < 1) throw DomainError("grid: points per period must be >= 1");
}

inline LogGridSpec parse_grid_spec(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 4 || parts[0] != "log") {
    throw DomainError("grid: expected log:<t_min>:<t_max>:<points-per-period>, got '" + std::string(text) + "'");
  }
  LogGridSpec g;
  try {
    std::size_t used = 0;
    g.t_min = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("t_min");
    g.t_max = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("t_max");
    const double ppp = std::stod(parts[3], &used);
    if (used != parts[3].size() || ppp != std::floor(ppp) || ppp > 1e6) throw std::invalid_argument("ppp");
    g.points_per_period = static_cast<int>(ppp);
  } catch (const std::exception&) {
    throw DomainError("grid: malformed number in '" + std::string(text) + "'");
  }
  validate(g);
  return g;
}

// t_i = t_min * beta^{i/P} up to t_max; t_max itself is always the last point.
inline std::vector<double> make_log_grid(const LogGridSpec& g, double beta) {
  validate(g);
  if (!(beta > 1.0)) throw DomainError("grid: beta must be > 1");
  const double step = std::log(beta) / g.points_per_period;
  const double span = std::log(g.t_max / g.t_min);
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double x = static_cast<double>(i) * step;
    if (x > span * (1.0 - 1e-12)) break;
    out.push_back(g.t_min * std::exp(x));
  }
  out.push_back(g.t_max);
  return out;
}

inline std::vector<double> make_log_grid(double t_min, double t_max, int points_per_period, double beta) {
  return make_log_grid(LogGridSpec{t_min, t_max, points_per_period}, beta);
}

// 0, 1, ..., n.
inline std::vector<double> unit_grid(long n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(i);
  return out;
}

}  // namespace traptail
