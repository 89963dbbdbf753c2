#pragma once

// Seeded Monte Carlo of single excursions and of the h-transformed walks.
//
// Sample i always draws from stream_for(seed, i), and bulk runs are cut into
// fixed-size blocks whose partial results are merged in block order. Results
// are therefore identical for every worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "traptail/errors.hpp"
#include "traptail/model.hpp"
#include "traptail/numeric.hpp"
#include "traptail/rng.hpp"
#include "traptail/stats.hpp"
#include "traptail/tail_table.hpp"

namespace traptail {

struct SimConfig {
  std::uint64_t n_samples = 100'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::optional<int> fixed_k;
  std::uint64_t step_cap = 1'000'000'000;
};

inline void validate(const SimConfig& c) {
  if (c.n_samples < 1) throw DomainError("SimConfig: n_samples must be >= 1");
  if (c.workers < 1) throw DomainError("SimConfig: workers must be >= 1");
  if (c.fixed_k && *c.fixed_k < 0) throw DomainError("SimConfig: fixed_k must be >= 0");
  if (c.step_cap < 2) throw DomainError("SimConfig: step_cap must be >= 2");
}

// One excursion from 0 and its split T = T_in + T_exc + T_out on the event A
// (k reached before returning to 0). Off A the split fields are zero.
struct ExcursionSample {
  int k = 0;
  bool reached_far_end = false;
  std::uint64_t T = 0;
  std::uint64_t T_in = 0;
  std::uint64_t T_exc = 0;
  std::uint64_t T_out = 0;
  std::uint64_t N = 0;               // non-final excursions from k back to k
  std::uint64_t exc_len_sq_sum = 0;  // sum of their squared lengths

  friend bool operator==(const ExcursionSample&, const ExcursionSample&) = default;
};

// Inverse-CDF draw of k with P[k >= n] = alpha^n.
inline int draw_trap_size(double log_alpha, Xoshiro256& rng) {
  const double x = std::floor(std::log(rng.uniform_open0()) / log_alpha);
  return static_cast<int>(std::min(x, 2.0e9));
}

class ExcursionSimulator {
 public:
  ExcursionSimulator(const ModelParams& params, const SimConfig& config)
      : params_(params), config_(config), up_(bernoulli_threshold(params.beta() / (1.0 + params.beta()))) {
    validate(config_);
  }

  const ModelParams& params() const noexcept { return params_; }
  const SimConfig& config() const noexcept { return config_; }

  ExcursionSample operator()(std::uint64_t index) const {
    Xoshiro256 rng = stream_for(config_.seed, index);
    const int k = config_.fixed_k ? *config_.fixed_k : draw_trap_size(params_.log_alpha(), rng);
    return walk(k, rng);
  }

 private:
  ExcursionSample walk(int k, Xoshiro256& rng) const {
    ExcursionSample s;
    s.k = k;
    if (k == 0) return s;
    std::uint64_t t = 1;
    int x = 1;
    bool reached = (k == 1);
    std::uint64_t t_in = reached ? 1 : 0;
    std::uint64_t last_k = t_in;
    std::uint64_t visits = 0;
    std::uint64_t sq = 0;
    while (x != 0) {
      if (x == k) {
        x = k - 1;
      } else {
        x += rng.bits53() < up_ ? 1 : -1;
      }
      ++t;
      if (x == k) {
        if (!reached) {
          reached = true;
          t_in = t;
        } else {
          const std::uint64_t len = t - last_k;
          ++visits;
          sq += len * len;
        }
        last_k = t;
      }
      if (t > config_.step_cap) {
        throw IterationLimitError("sample_excursion: step cap " + std::to_string(config_.step_cap) + " exceeded");
      }
    }
    s.T = t;
    s.reached_far_end = reached;
    if (reached) {
      s.T_in = t_in;
      s.T_exc = last_k - t_in;
      s.T_out = t - last_k;
      s.N = visits;
      s.exc_len_sq_sum = sq;
    }
    return s;
  }

  ModelParams params_;
  SimConfig config_;
  std::uint64_t up_;
};

inline ExcursionSample sample_excursion(const ModelParams& params, const SimConfig& config,
                                        std::uint64_t stream_index) {
  return ExcursionSimulator(params, config)(stream_index);
}

inline constexpr std::uint64_t kSimBlock = 1u << 14;

// Runs samples 0..n-1 and folds them into Acc. Acc must be default
// constructible and provide merge(const Acc&); visit(Acc&, const
// ExcursionSample&) is called once per sample.
template <class Acc, class Visit>
Acc accumulate_excursions(const ModelParams& params, const SimConfig& config, Visit&& visit,
                          const Acc& prototype = Acc{}) {
  const ExcursionSimulator sim(params, config);
  const std::uint64_t blocks = (config.n_samples + kSimBlock - 1) / kSimBlock;
  std::vector<Acc> partial(static_cast<std::size_t>(blocks), prototype);
  parallel_for(partial.size(), config.workers, [&](std::size_t b) {
    const std::uint64_t lo = b * kSimBlock;
    const std::uint64_t hi = std::min(config.n_samples, lo + kSimBlock);
    for (std::uint64_t i = lo; i < hi; ++i) visit(partial[b], sim(i));
  });
  Acc total = prototype;
  for (const auto& p : partial) total.merge(p);
  return total;
}

inline std::vector<ExcursionSample> sample_excursions(const ModelParams& params, const SimConfig& config) {
  const ExcursionSimulator sim(params, config);
  std::vector<ExcursionSample> out(static_cast<std::size_t>(config.n_samples));
  const std::uint64_t blocks = (config.n_samples + kSimBlock - 1) / kSimBlock;
  parallel_for(static_cast<std::size_t>(blocks), config.workers, [&](std::size_t b) {
    const std::uint64_t lo = b * kSimBlock;
    const std::uint64_t hi = std::min(config.n_samples, lo + kSimBlock);
    for (std::uint64_t i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = sim(i);
  });
  return out;
}

// Histogram of how many grid points lie strictly below each observed value;
// exceedance counts #{value > t_i} follow by a suffix sum.
struct ExceedanceCounter {
  std::vector<double> grid;
  std::vector<std::uint64_t> hist;  // size grid+1
  std::uint64_t total = 0;

  ExceedanceCounter() = default;
  explicit ExceedanceCounter(std::vector<double> g) : grid(std::move(g)), hist(grid.size() + 1, 0) {}

  void add(double value) {
    const auto below = std::lower_bound(grid.begin(), grid.end(), value) - grid.begin();
    ++hist[static_cast<std::size_t>(below)];
    ++total;
  }
  void merge(const ExceedanceCounter& o) {
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] += o.hist[i];
    total += o.total;
  }
  // #{value > grid[i]}
  std::vector<std::uint64_t> exceedances() const {
    std::vector<std::uint64_t> out(grid.size(), 0);
    std::uint64_t run = 0;
    for (std::size_t j = grid.size(); j-- > 0;) {
      run += hist[j + 1];
      out[j] = run;
    }
    return out;
  }
};

inline TailTable tail_from_counts(const std::vector<double>& t_grid, const std::vector<std::uint64_t>& exceed,
                                  std::uint64_t n) {
  TailTable table;
  table.t_grid = t_grid;
  table.provenance = Provenance::Simulated;
  table.survival.resize(t_grid.size());
  std::vector<double> half(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    table.survival[i] = static_cast<double>(exceed[i]) / static_cast<double>(n);
    half[i] = wilson_interval(exceed[i], n).halfwidth();
  }
  table.ci_halfwidth = std::move(half);
  return table;
}

// Empirical P[T > t] with 95% Wilson half-widths.
inline TailTable estimate_tail(const ModelParams& params, const std::vector<double>& t_grid,
                               const SimConfig& config) {
  if (t_grid.empty()) throw EmptyInputError("estimate_tail: empty grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("estimate_tail: grid must be ascending");
  }
  const auto counter = accumulate_excursions<ExceedanceCounter>(
      params, config, [](ExceedanceCounter& acc, const ExcursionSample& s) { acc.add(static_cast<double>(s.T)); },
      ExceedanceCounter(t_grid));
  return tail_from_counts(t_grid, counter.exceedances(), config.n_samples);
}

// First-passage duration of an h-transformed or free walk.
//   ConditionedToK (k >= 2): from k back to k, never touching 0 (T^(1)).
//   ConditionedToZero (k >= 1): from k down to 0, never returning to k (T_out).
//   Free / FreeReversed (k ignored): return time to 0 of the walk on Z whose
//     first step leads away from 0 against the drift.
class ConditionedWalkSimulator {
 public:
  ConditionedWalkSimulator(WalkKind kind, double beta, int k, const SimConfig& config)
      : kind_(kind), k_(k), config_(config) {
    detail::require_beta(beta, "sample_conditioned_return");
    validate(config_);
    switch (kind) {
      case WalkKind::Free:
      case WalkKind::FreeReversed:
        toward_zero_ = bernoulli_threshold(beta / (1.0 + beta));
        break;
      case WalkKind::ConditionedToK:
        detail::require_trap(k, 2, "sample_conditioned_return");
        [[fallthrough]];
      case WalkKind::ConditionedToZero:
        detail::require_trap(k, 1, "sample_conditioned_return");
        up_.assign(static_cast<std::size_t>(k) + 1, 0);
        for (int l = 1; l <= k - 1; ++l) {
          up_[static_cast<std::size_t>(l)] = bernoulli_threshold(conditioned_up_prob(kind, beta, k, l));
        }
        break;
    }
  }

  std::uint64_t operator()(std::uint64_t index) const {
    Xoshiro256 rng = stream_for(config_.seed, index);
    std::uint64_t t = 1;
    if (kind_ == WalkKind::Free || kind_ == WalkKind::FreeReversed) {
      std::uint64_t dist = 1;
      while (dist != 0) {
        dist = rng.bits53() < toward_zero_ ? dist - 1 : dist + 1;
        ++t;
        check_cap(t);
      }
      return t;
    }
    int x = k_ - 1;  // the step off k is forced
    const int target = kind_ == WalkKind::ConditionedToK ? k_ : 0;
    while (x != target) {
      x += rng.bits53() < up_[static_cast<std::size_t>(x)] ? 1 : -1;
      ++t;
      check_cap(t);
    }
    return t;
  }

 private:
  void check_cap(std::uint64_t t) const {
    if (t > config_.step_cap) {
      throw IterationLimitError("sample_conditioned_return: step cap " + std::to_string(config_.step_cap) +
                                " exceeded");
    }
  }

  WalkKind kind_;
  int k_;
  SimConfig config_;
  std::uint64_t toward_zero_ = 0;
  std::vector<std::uint64_t> up_;
};

inline std::uint64_t sample_conditioned_return(WalkKind kind, double beta, int k, const SimConfig& config,
                                               std::uint64_t stream_index) {
  return ConditionedWalkSimulator(kind, beta, k, config)(stream_index);
}

// config.n_samples durations, as doubles for the moment estimators.
inline std::vector<double> sample_conditioned_returns(WalkKind kind, double beta, int k, const SimConfig& config) {
  const ConditionedWalkSimulator sim(kind, beta, k, config);
  std::vector<double> out(static_cast<std::size_t>(config.n_samples));
  const std::uint64_t blocks = (config.n_samples + kSimBlock - 1) / kSimBlock;
  parallel_for(static_cast<std::size_t>(blocks), config.workers, [&](std::size_t b) {
    const std::uint64_t lo = b * kSimBlock;
    const std::uint64_t hi = std::min(config.n_samples, lo + kSimBlock);
    for (std::uint64_t i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = static_cast<double>(sim(i));
  });
  return out;
}

// ---------------------------------------------------------------------------
// Summaries

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::uint64_t count = 0;  // observations behind the estimate
};

struct TrapStats {
  int k = -1;  // -1 for the pooled record
  std::uint64_t n = 0;
  std::uint64_t n_reached = 0;
  Estimate p_reach;                    // P[A]
  Estimate mean_T;                     // E[T]
  Estimate mean_N_given_A;             // E[N | A]
  Estimate mean_T_in_given_A;          // E[T_in | A]
  Estimate mean_T_exc_given_A;         // E[T_exc | A]
  Estimate mean_T_out_given_A;         // E[T_out | A]
  Estimate excursion_length_mean;      // mean of the individual k-to-k excursions
  Estimate excursion_length_variance;  // their variance; se is the normal-theory approximation
};

struct StatsRecord {
  std::uint64_t n_samples = 0;
  TrapStats pooled;
  std::vector<TrapStats> per_k;  // ascending k
  // sum_k (n_k / n) E[N | A, k]: the trap-size mixture of the conditional means.
  Estimate mixture_mean_N_given_A;
};

// Integer running sums, so merging is exact and order independent.
class StatsAccumulator {
 public:
  void add(const ExcursionSample& s) {
    add_to(by_k_[s.k], s);
    add_to(pooled_, s);
  }
  void merge(const StatsAccumulator& o) {
    for (const auto& [k, sums] : o.by_k_) by_k_[k].merge(sums);
    pooled_.merge(o.pooled_);
  }
  bool empty() const noexcept { return pooled_.n == 0; }

  StatsRecord record() const {
    if (empty()) throw EmptyInputError("summarize: no samples");
    StatsRecord r;
    r.n_samples = pooled_.n;
    r.pooled = finish(pooled_, -1);
    const double n = static_cast<double>(pooled_.n);
    long double mix = 0.0L, within = 0.0L;
    for (const auto& [k, sums] : by_k_) {
      r.per_k.push_back(finish(sums, k));
      const auto& tk = r.per_k.back();
      const double f = static_cast<double>(sums.n) / n;
      if (sums.n_reached > 0) {
        mix += f * tk.mean_N_given_A.value;
        within += static_cast<long double>(f) * f * tk.mean_N_given_A.se * tk.mean_N_given_A.se;
      }
    }
    long double between = 0.0L;
    for (const auto& tk : r.per_k) {
      if (tk.n_reached == 0) continue;
      const long double d = tk.mean_N_given_A.value - mix;
      between += static_cast<long double>(tk.n) / n * d * d;
    }
    r.mixture_mean_N_given_A = {static_cast<double>(mix),
                                static_cast<double>(std::sqrt(within + between / n)), pooled_.n};
    return r;
  }

 private:
  __extension__ typedef unsigned __int128 u128;

  struct Moments {
    std::uint64_t s1 = 0;
    u128 s2 = 0;
    void add(std::uint64_t x) {
      s1 += x;
      s2 += static_cast<u128>(x) * x;
    }
    void merge(const Moments& o) {
      s1 += o.s1;
      s2 += o.s2;
    }
  };

  struct Sums {
    std::uint64_t n = 0;
    std::uint64_t n_reached = 0;
    Moments T, N, T_in, T_exc, T_out;
    std::uint64_t exc_count = 0;
    std::uint64_t exc_len = 0;
    u128 exc_len_sq = 0;
    void merge(const Sums& o) {
      n += o.n;
      n_reached += o.n_reached;
      T.merge(o.T);
      N.merge(o.N);
      T_in.merge(o.T_in);
      T_exc.merge(o.T_exc);
      T_out.merge(o.T_out);
      exc_count += o.exc_count;
      exc_len += o.exc_len;
      exc_len_sq += o.exc_len_sq;
    }
  };

  static void add_to(Sums& sums, const ExcursionSample& s) {
    ++sums.n;
    sums.T.add(s.T);
    if (!s.reached_far_end) return;
    ++sums.n_reached;
    sums.N.add(s.N);
    sums.T_in.add(s.T_in);
    sums.T_exc.add(s.T_exc);
    sums.T_out.add(s.T_out);
    sums.exc_count += s.N;
    sums.exc_len += s.T_exc;
    sums.exc_len_sq += s.exc_len_sq_sum;
  }

  static Estimate mean_of(std::uint64_t count, std::uint64_t s1, u128 s2) {
    if (count == 0) return {0.0, 0.0, 0};
    const long double n = static_cast<long double>(count);
    const long double mean = static_cast<long double>(s1) / n;
    long double var = 0.0L;
    if (count > 1) var = std::max(0.0L, (static_cast<long double>(s2) - n * mean * mean) / (n - 1.0L));
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)), count};
  }

  static TrapStats finish(const Sums& s, int k) {
    TrapStats t;
    t.k = k;
    t.n = s.n;
    t.n_reached = s.n_reached;
    const double p = static_cast<double>(s.n_reached) / static_cast<double>(s.n);
    t.p_reach = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(s.n)), s.n};
    t.mean_T = mean_of(s.n, s.T.s1, s.T.s2);
    t.mean_N_given_A = mean_of(s.n_reached, s.N.s1, s.N.s2);
    t.mean_T_in_given_A = mean_of(s.n_reached, s.T_in.s1, s.T_in.s2);
    t.mean_T_exc_given_A = mean_of(s.n_reached, s.T_exc.s1, s.T_exc.s2);
    t.mean_T_out_given_A = mean_of(s.n_reached, s.T_out.s1, s.T_out.s2);
    t.excursion_length_mean = mean_of(s.exc_count, s.exc_len, s.exc_len_sq);
    if (s.exc_count > 1) {
      const long double m = static_cast<long double>(s.exc_count);
      const long double mean = static_cast<long double>(s.exc_len) / m;
      const long double var =
          std::max(0.0L, (static_cast<long double>(s.exc_len_sq) - m * mean * mean) / (m - 1.0L));
      t.excursion_length_variance = {static_cast<double>(var), static_cast<double>(var * std::sqrt(2.0L / (m - 1.0L))),
                                     s.exc_count};
    }
    return t;
  }

  std::map<int, Sums> by_k_;
  Sums pooled_;
};

inline StatsRecord summarize(std::span<const ExcursionSample> samples) {
  if (samples.empty()) throw EmptyInputError("summarize: no samples");
  StatsAccumulator acc;
  for (const auto& s : samples) acc.add(s);
  return acc.record();
}

inline StatsRecord simulate_stats(const ModelParams& params, const SimConfig& config) {
  return accumulate_excursions<StatsAccumulator>(
             params, config, [](StatsAccumulator& acc, const ExcursionSample& s) { acc.add(s); })
      .record();
}

inline void write_samples_csv(std::ostream& os, std::span<const ExcursionSample> samples) {
  os << "k,reached,T,T_in,T_exc,T_out,N\n";
  for (const auto& s : samples) {
    os << s.k << ',' << (s.reached_far_end ? 1 : 0) << ',' << s.T << ',' << s.T_in << ',' << s.T_exc << ','
       << s.T_out << ',' << s.N << '\n';
  }
}

}  // namespace traptail
