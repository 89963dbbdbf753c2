#pragma once

// End-to-end verification checks (a)-(f) and the JSON report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "traptail/asympt.hpp"
#include "traptail/exact.hpp"
#include "traptail/grid.hpp"
#include "traptail/json_out.hpp"
#include "traptail/model.hpp"
#include "traptail/sim.hpp"
#include "traptail/stats.hpp"

namespace traptail {

struct CheckResult {
  std::string id;    // "a" .. "f"
  std::string name;  // stable machine name
  bool pass = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
  Json data = Json::object();  // per-point diagnostics
};

struct VerifyConfig {
  double alpha = 0.5;
  double beta = 2.0;
  LogGridSpec grid{1.0, 1e5, 32};
  double eps = 1e-12;
  int modes = kDefaultModes;
  SimConfig sim{1'000'000, 1, 1, std::nullopt, 1'000'000'000};
  bool corrupt_phase = false;  // negative control: d_k -> -d_k in g

  double ratio_band = 0.10;
  double series_t_min = 1e3, series_t_max = 1e6, series_tol = 1e-6;
  double sandwich_t_min = 10.0, sandwich_t_max = 1e6;
  double oscillation_t = 1e6, oscillation_tol = 0.05;
  double count_t_min = 1e2, count_t_max = 1e4;
  int count_points_per_period = 4;
  double count_coverage = 0.95;
  double decomposition_c = 10.0;
  double decomposition_tol = 0.10;
};

struct VerificationReport {
  double alpha = 0.0, beta = 0.0, rho = 0.0;
  std::vector<CheckResult> checks;
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
};

inline OscillationSpectrum corrupt_phases(OscillationSpectrum s) {
  for (auto& m : s.modes) m.d = -m.d;
  return s;
}

inline Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push(x);
  return a;
}

inline std::vector<double> theorem_ratio_series(const OscillationSpectrum& s, const TailTable& table) {
  std::vector<double> out(table.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.survival[i] > 0.0) out[i] = theorem_ratio(s, table.t_grid[i], table.survival[i]);
  }
  return out;
}

// (a) t^rho P[T>t] / g((b-1)^2 t / 2b) inside [1-band, 1+band] over the top
// decade of the grid, with a smaller worst deviation than the decade below.
inline CheckResult check_theorem_ratio(const OscillationSpectrum& s, const TailTable& exact, double band) {
  CheckResult r{"a", "theorem_ratio", false, 0.0, 1.0, band, "", Json::object()};
  const auto ratio = theorem_ratio_series(s, exact);
  const double t_max = exact.t_grid.back();
  double top = 0.0, below = 0.0;
  bool have_below = false, in_band = true;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    const double t = exact.t_grid[i];
    const double dev = std::isfinite(ratio[i]) ? std::abs(ratio[i] - 1.0) : std::numeric_limits<double>::infinity();
    if (t >= t_max / 10.0) {
      top = std::max(top, dev);
      if (!(dev <= band)) in_band = false;
    } else if (t >= t_max / 100.0) {
      below = std::max(below, dev);
      have_below = true;
    }
  }
  const bool trend = !have_below || top < below;
  r.pass = in_band && trend;
  r.observed = top;
  std::ostringstream d;
  d << "max |ratio-1| on [" << t_max / 10.0 << ", " << t_max << "] = " << top;
  if (have_below) {
    d << ", on [" << t_max / 100.0 << ", " << t_max / 10.0 << ") = " << below << (trend ? " (decreasing)" : " (not decreasing)");
  } else {
    d << ", grid too short for the trend comparison";
  }
  r.detail = d.str();
  r.data.set("t", vec_json(exact.t_grid)).set("ratio", vec_json(ratio));
  r.data.set("max_dev_top_decade", top).set("max_dev_previous_decade", have_below ? Json(below) : Json());
  return r;
}

// (b) |f_series / f_asymptotic - 1| < tol on a log grid.
inline CheckResult check_series_asymptotic(const ModelParams& p, const OscillationSpectrum& s, const VerifyConfig& c) {
  CheckResult r{"b", "series_vs_asymptotic", false, 0.0, 0.0, c.series_tol, "", Json::object()};
  const auto grid = make_log_grid(c.series_t_min, c.series_t_max, 32, p.beta());
  double worst = 0.0, at = grid.front();
  for (double t : grid) {
    const double dev = std::abs(f_series(p, t, 1e-16).value / f_asymptotic(s, t) - 1.0);
    if (!(dev <= worst)) {
      worst = dev;
      at = t;
    }
  }
  r.observed = worst;
  r.pass = worst < c.series_tol;
  std::ostringstream d;
  d << "max relative difference " << worst << " at t=" << at << " over [" << c.series_t_min << ", "
    << c.series_t_max << "]";
  r.detail = d.str();
  return r;
}

// (c) C1 <= t^rho f(t) <= C2.
inline CheckResult check_sandwich(const ModelParams& p, const VerifyConfig& c) {
  CheckResult r{"c", "sandwich_constants", false, 0.0, 0.0, 0.0, "", Json::object()};
  const auto k = sandwich_constants(p);
  const auto grid = make_log_grid(c.sandwich_t_min, c.sandwich_t_max, 32, p.beta());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double t : grid) {
    const double h = std::pow(t, p.rho()) * f_series(p, t, 1e-16).value;
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  r.pass = k.lower <= lo && hi <= k.upper;
  r.observed = lo;
  r.expected = k.lower;
  std::ostringstream d;
  d << "t^rho f(t) in [" << lo << ", " << hi << "], constants [" << k.lower << ", " << k.upper << "]";
  r.detail = d.str();
  r.data.set("min", lo).set("max", hi).set("C1", k.lower).set("C2", k.upper);
  return r;
}

// (d) peak-to-peak of t^rho f(t) over one log-b period equals 2 c_1 A.
inline CheckResult check_oscillation_amplitude(const ModelParams& p, const OscillationSpectrum& s,
                                               const VerifyConfig& c) {
  CheckResult r{"d", "oscillation_amplitude", false, 0.0, 1.0, c.oscillation_tol, "", Json::object()};
  constexpr int kPoints = 2048;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < kPoints; ++i) {
    const double t = c.oscillation_t * std::exp(p.log_beta() * i / kPoints);
    const double h = std::pow(t, p.rho()) * f_series(p, t, 1e-16).value;
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  const double c1 = s.modes.empty() ? oscillation_spectrum(p, 1).modes[0].c : s.modes[0].c;
  const double expected = 2.0 * c1 * s.power_prefactor;
  r.observed = (hi - lo) / expected;
  r.pass = std::abs(r.observed - 1.0) < c.oscillation_tol;
  std::ostringstream d;
  d << "peak-to-peak " << hi - lo << " vs 2 c_1 A = " << expected;
  r.detail = d.str();
  r.data.set("peak_to_peak", hi - lo).set("two_c1_A", expected);
  return r;
}

// Everything (e) and (f) need from one simulation pass.
struct VerifySimAccumulator {
  ExceedanceCounter N;     // on the count grid
  ExceedanceCounter T;     // on the decomposition times t_j
  ExceedanceCounter T_in;  // on thresholds c ln t_j, A only
  ExceedanceCounter T_out;
  std::uint64_t reached = 0;

  void add(const ExcursionSample& s) {
    N.add(static_cast<double>(s.N));
    T.add(static_cast<double>(s.T));
    if (s.reached_far_end) {
      ++reached;
      T_in.add(static_cast<double>(s.T_in));
      T_out.add(static_cast<double>(s.T_out));
    }
  }
  void merge(const VerifySimAccumulator& o) {
    N.merge(o.N);
    T.merge(o.T);
    T_in.merge(o.T_in);
    T_out.merge(o.T_out);
    reached += o.reached;
  }
};

inline std::vector<double> decomposition_times() { return {1e2, 1e3, 1e4}; }

inline VerifySimAccumulator run_verify_simulation(const ModelParams& p, const VerifyConfig& c) {
  VerifySimAccumulator proto;
  proto.N = ExceedanceCounter(make_log_grid(c.count_t_min, c.count_t_max, c.count_points_per_period, p.beta()));
  const auto times = decomposition_times();
  std::vector<double> thresholds;
  for (double t : times) thresholds.push_back(c.decomposition_c * std::log(t));
  proto.T = ExceedanceCounter(times);
  proto.T_in = ExceedanceCounter(thresholds);
  proto.T_out = ExceedanceCounter(thresholds);
  return accumulate_excursions<VerifySimAccumulator>(
      p, c.sim, [](VerifySimAccumulator& acc, const ExcursionSample& s) { acc.add(s); }, proto);
}

// (e) P[N>t] b/(b-1) / f((b-1)t) = 1 inside a simultaneous (Bonferroni)
// confidence band over the count grid.
inline CheckResult check_count_tail(const ModelParams& p, const VerifySimAccumulator& acc, const VerifyConfig& c) {
  CheckResult r{"e", "count_tail_reduction", false, 0.0, 1.0, 0.0, "", Json::object()};
  const auto& grid = acc.N.grid;
  const auto exceed = acc.N.exceedances();
  const std::uint64_t n = acc.N.total;
  const double per_point = 1.0 - (1.0 - c.count_coverage) / static_cast<double>(grid.size());
  const double z = normal_quantile(per_point);
  const double b = p.beta();
  std::vector<double> ratio, lower, upper, exact;
  bool all = true;
  double worst = -1.0, worst_half = 0.0, worst_t = grid.front();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double scale = b / (b - 1.0) / f_series(p, (b - 1.0) * t, 1e-16).value;
    const auto ci = wilson_interval(exceed[i], n, z);
    const double rt = static_cast<double>(exceed[i]) / static_cast<double>(n) * scale;
    ratio.push_back(rt);
    lower.push_back(ci.lower * scale);
    upper.push_back(ci.upper * scale);
    exact.push_back(count_tail(p, t).value * scale);
    if (!(lower.back() <= 1.0 && 1.0 <= upper.back())) all = false;
    const double dev = std::abs(rt - 1.0);
    if (dev > worst) {
      worst = dev;
      worst_half = 0.5 * (upper.back() - lower.back());
      worst_t = t;
    }
  }
  r.pass = all;
  r.observed = worst;
  r.tolerance = worst_half;
  std::ostringstream d;
  d << grid.size() << " points on [" << c.count_t_min << ", " << c.count_t_max << "], " << n
    << " samples, simultaneous coverage " << c.count_coverage << "; worst |ratio-1| = " << worst << " at t=" << worst_t
    << " with band half-width " << worst_half;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) outside += (lower[i] <= 1.0 && 1.0 <= upper[i]) ? 0 : 1;
  d << "; " << outside << " point(s) outside the band";
  r.detail = d.str();
  r.data.set("t", vec_json(grid)).set("ratio", vec_json(ratio)).set("lower", vec_json(lower));
  r.data.set("upper", vec_json(upper)).set("exact_ratio", vec_json(exact)).set("z", z);
  return r;
}

// (f) P[T_in > c ln t, A] and P[T_out > c ln t, A] are negligible against
// P[T > t] and shrink as t grows.
inline CheckResult check_decomposition(const VerifySimAccumulator& acc, const VerifyConfig& c) {
  CheckResult r{"f", "decomposition_negligible", false, 0.0, 0.0, c.decomposition_tol, "", Json::object()};
  const auto times = decomposition_times();
  const auto t_ex = acc.T.exceedances();
  const auto in_ex = acc.T_in.exceedances();
  const auto out_ex = acc.T_out.exceedances();
  const double n = static_cast<double>(acc.T.total);
  const double nA = static_cast<double>(std::max<std::uint64_t>(acc.reached, 1));
  std::vector<double> q_in, q_out, tail, rel;
  bool monotone = true;
  for (std::size_t j = 0; j < times.size(); ++j) {
    q_in.push_back(static_cast<double>(in_ex[j]) / nA);
    q_out.push_back(static_cast<double>(out_ex[j]) / nA);
    tail.push_back(static_cast<double>(t_ex[j]) / n);
    const double joint = static_cast<double>(std::max(in_ex[j], out_ex[j])) / n;
    rel.push_back(tail.back() > 0.0 ? joint / tail.back() : (joint > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
    if (j > 0 && (q_in[j] > q_in[j - 1] || q_out[j] > q_out[j - 1])) monotone = false;
  }
  r.observed = rel.back();
  r.pass = monotone && rel.back() <= c.decomposition_tol;
  std::ostringstream d;
  d << "threshold " << c.decomposition_c << " ln t; P[T_in or T_out piece > threshold, A] / P[T > t] at t="
    << times.back() << " is " << rel.back() << (monotone ? "; conditional tails nonincreasing" : "; conditional tails not monotone");
  r.detail = d.str();
  r.data.set("t", vec_json(times)).set("p_T_in_given_A", vec_json(q_in)).set("p_T_out_given_A", vec_json(q_out));
  r.data.set("p_T", vec_json(tail)).set("relative", vec_json(rel));
  return r;
}

inline VerificationReport run_verification(const VerifyConfig& c) {
  const ModelParams p = make_params(c.alpha, c.beta);
  validate(c.grid);
  validate(c.sim);
  OscillationSpectrum s = oscillation_spectrum(p, c.modes);
  if (c.corrupt_phase) s = corrupt_phases(s);
  VerificationReport report;
  report.alpha = p.alpha();
  report.beta = p.beta();
  report.rho = p.rho();
  const auto exact = mixture_tail(p, make_log_grid(c.grid, p.beta()), c.eps, c.sim.workers);
  report.checks.push_back(check_theorem_ratio(s, exact, c.ratio_band));
  report.checks.push_back(check_series_asymptotic(p, s, c));
  report.checks.push_back(check_sandwich(p, c));
  report.checks.push_back(check_oscillation_amplitude(p, s, c));
  const auto acc = run_verify_simulation(p, c);
  report.checks.push_back(check_count_tail(p, acc, c));
  report.checks.push_back(check_decomposition(acc, c));
  return report;
}

inline Json to_json(const CheckResult& r) {
  Json j = Json::object();
  j.set("id", r.id).set("name", r.name).set("pass", r.pass).set("observed", r.observed);
  j.set("expected", r.expected).set("tolerance", r.tolerance).set("detail", r.detail).set("data", r.data);
  return j;
}

inline Json to_json(const VerificationReport& report, const VerifyConfig& c) {
  Json params = Json::object();
  params.set("alpha", report.alpha).set("beta", report.beta).set("rho", report.rho);
  Json config = Json::object();
  config.set("grid", "log:" + format_g17(c.grid.t_min) + ":" + format_g17(c.grid.t_max) + ":" +
                         std::to_string(c.grid.points_per_period));
  config.set("eps", c.eps).set("modes", c.modes).set("samples", c.sim.n_samples).set("seed", c.sim.seed);
  config.set("corrupt_phase", c.corrupt_phase);
  Json checks = Json::array();
  for (const auto& r : report.checks) checks.push(to_json(r));
  Json j = Json::object();
  j.set("schema", 1).set("params", params).set("config", config).set("checks", checks).set("pass", report.all_pass());
  return j;
}

}  // namespace traptail
