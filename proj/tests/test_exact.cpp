#include <cmath>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include "traptail/exact.hpp"
#include "traptail/grid.hpp"

using namespace traptail;
using Rational = boost::multiprecision::cpp_rational;

namespace {

// P_k[T = t] for t <= t_max by walking every path from 0 until its first
// return, in exact rational arithmetic. beta = num/den.
std::vector<Rational> enumerate_paths(long num, long den, int k, int t_max) {
  std::vector<Rational> pmf(static_cast<std::size_t>(t_max) + 1, Rational(0));
  if (k == 0) {
    pmf[0] = 1;
    return pmf;
  }
  const Rational up(num, num + den);
  const Rational down(den, num + den);
  std::function<void(int, int, const Rational&)> walk = [&](int x, int t, const Rational& prob) {
    if (x == 0) {
      pmf[static_cast<std::size_t>(t)] += prob;
      return;
    }
    if (t == t_max) return;
    if (x == k) {
      walk(k - 1, t + 1, prob);
    } else {
      walk(x + 1, t + 1, prob * up);
      walk(x - 1, t + 1, prob * down);
    }
  };
  walk(1, 1, Rational(1));
  return pmf;
}

}  // namespace

TEST(FixedK, TrivialTraps) {
  const auto d0 = fixed_k_return_distribution(2.0, 0, 10);
  EXPECT_EQ(d0.pmf[0], 1.0);
  EXPECT_EQ(d0.remainder, 0.0);
  const auto d1 = fixed_k_return_distribution(2.0, 1, 10);
  EXPECT_EQ(d1.pmf[2], 1.0);
  EXPECT_EQ(d1.remainder, 0.0);
  for (std::size_t t = 0; t < d1.pmf.size(); ++t) {
    if (t != 2) { EXPECT_EQ(d1.pmf[t], 0.0); }
  }
}

TEST(FixedK, TwoStateTrapIsGeometricInPairs) {
  const auto d = fixed_k_return_distribution(2.0, 2, 20);
  for (int m = 1; m <= 10; ++m) {
    EXPECT_NEAR(d.pmf[2 * m], (1.0 / 3.0) * std::pow(2.0 / 3.0, m - 1), 1e-15) << m;
  }
  const auto exact = enumerate_paths(2, 1, 2, 20);
  for (int t = 0; t <= 20; ++t) EXPECT_NEAR(d.pmf[t], exact[t].convert_to<double>(), 1e-15);
}

TEST(FixedK, MatchesRationalPathEnumeration) {
  const std::vector<std::pair<long, long>> betas = {{2, 1}, {3, 1}, {3, 2}, {7, 2}};
  for (const auto& [num, den] : betas) {
    const double beta = static_cast<double>(num) / static_cast<double>(den);
    for (int k = 0; k <= 3; ++k) {
      const auto d = fixed_k_return_distribution(beta, k, 16);
      const auto exact = enumerate_paths(num, den, k, 16);
      for (int t = 0; t <= 16; ++t) {
        EXPECT_NEAR(d.pmf[t], exact[t].convert_to<double>(), 1e-12) << "beta=" << beta << " k=" << k << " t=" << t;
      }
    }
  }
}

TEST(FixedK, ConservationAndParity) {
  for (double beta : {1.2, 2.0, 5.0}) {
    for (int k : {1, 2, 3, 7, 20}) {
      const auto d = fixed_k_return_distribution(beta, k, 3000);
      CompensatedSum returned;
      for (std::size_t t = 0; t < d.pmf.size(); ++t) {
        returned += d.pmf[t];
        EXPECT_NEAR(returned.value() + d.survival[t], 1.0, 1e-12);
        if (t % 2 == 1) { EXPECT_EQ(d.pmf[t], 0.0); }
      }
      EXPECT_EQ(d.pmf[0], 0.0);
      EXPECT_NEAR(returned.value() + d.remainder, 1.0, 1e-12);
    }
  }
}

TEST(FixedK, MonotoneInTrapSize) {
  std::vector<FixedKDistribution> ds;
  for (int k = 1; k <= 20; ++k) ds.push_back(fixed_k_return_distribution(2.0, k, 400));
  for (std::size_t i = 1; i < ds.size(); ++i) {
    for (std::size_t t = 0; t < ds[i].survival.size(); ++t) {
      EXPECT_GE(ds[i].survival[t], ds[i - 1].survival[t] - 1e-12);
    }
  }
}

TEST(FixedK, Errors) {
  EXPECT_THROW(fixed_k_return_distribution(2.0, 2, 1), DomainError);
  EXPECT_THROW(fixed_k_return_distribution(2.0, -1, 10), DomainError);
  EXPECT_THROW(fixed_k_return_distribution(1.0, 2, 10), DomainError);
  EXPECT_THROW(fixed_k_return_distribution(2.0, kMaxTrapStates + 1, 10), OverflowError);
}

TEST(TruncatedMoment, FixedK) {
  const auto m1 = truncated_moment(fixed_k_return_distribution(2.0, 1, 10), 1);
  EXPECT_EQ(m1.value, 2.0);
  const auto m3 = truncated_moment(fixed_k_return_distribution(2.0, 3, 2000), 1);
  EXPECT_LE(std::abs(m3.value - 14.0), m3.bound);
  EXPECT_LT(m3.bound, 1e-9);
  for (int k = 1; k <= 10; ++k) {
    const auto m = truncated_moment(fixed_k_return_distribution(2.0, k, 200), 1);
    EXPECT_LE(std::abs(m.value - expected_excursion_fixed(2.0, k)), m.bound + 1e-12) << k;
  }
  EXPECT_THROW(truncated_moment(fixed_k_return_distribution(2.0, 3, 10), 3), DomainError);
}

TEST(TruncatedMoment, SecondMomentOfTheTwoStateTrap) {
  // T = 2J with J geometric(1/3) on {1, 2, ...}: E[T^2] = 4 (2 - q)/q^2 = 60.
  const auto m = truncated_moment(fixed_k_return_distribution(2.0, 2, 400), 2);
  EXPECT_NEAR(m.value, 60.0, 1e-9);
}

TEST(TruncatedMoment, AbelSummationOverATable) {
  const auto d = fixed_k_return_distribution(2.0, 3, 2000);
  TailTable table;
  table.provenance = Provenance::Exact;
  table.truncation_bound = 0.0;
  table.t_grid = unit_grid(2000);
  table.survival = d.survival;
  const auto m = truncated_moment(table, 1);
  EXPECT_NEAR(m.value, 14.0, 1e-9);
  table.t_grid[3] = 3.5;
  EXPECT_THROW(truncated_moment(table, 1), DomainError);
}

TEST(TruncatedMoment, AbelBoundIsInfiniteWhileMassSurvives) {
  const auto d = fixed_k_return_distribution(2.0, 6, 50);
  TailTable table;
  table.t_grid = unit_grid(50);
  table.survival = d.survival;
  table.truncation_bound = 0.0;
  EXPECT_TRUE(std::isinf(truncated_moment(table, 1).bound));
}

TEST(MixtureMoment, ApproachesTheClosedForm) {
  const auto p = make_params(0.3, 2.0);
  const auto m = mixture_moment(p, 1, 20000, 1e-14);
  ASSERT_TRUE(std::holds_alternative<MixtureMoment>(m));
  EXPECT_NEAR(std::get<MixtureMoment>(m).estimate.value, 1.5, 1e-5);
  EXPECT_TRUE(std::holds_alternative<Infinite>(mixture_moment(make_params(0.5, 2.0), 1, 1000, 1e-12)));
  EXPECT_TRUE(std::holds_alternative<Infinite>(mixture_moment(p, 2, 1000, 1e-12)));
}

TEST(MixtureTail, AtZeroAndTwo) {
  const auto p = make_params(0.5, 2.0);
  const auto table = mixture_tail(p, {0.0, 1.0, 2.0, 2.5}, 1e-12);
  const double bound = *table.truncation_bound;
  EXPECT_LE(bound, 1e-12);
  EXPECT_NEAR(table.survival[0], 0.5, bound + 1e-15);
  EXPECT_NEAR(table.survival[1], 0.5, bound + 1e-15);
  // P[T > 2] = sum_{k>=2} (1-a) a^k (1 - P_k[T=2]) with P_k[T=2] = 1/(1+b).
  double brute = 0.0;
  for (int k = 2; k <= 20; ++k) {
    const auto paths = enumerate_paths(2, 1, k, 2);
    brute += 0.5 * std::pow(0.5, k) * (1.0 - paths[2].convert_to<double>());
  }
  EXPECT_NEAR(table.survival[2], brute, 1e-6);
  EXPECT_NEAR(table.survival[2], 1.0 / 6.0, bound + 1e-15);
  EXPECT_EQ(table.survival[3], table.survival[2]);
}

TEST(MixtureTail, InvariantsAndTailOfTail) {
  const auto p = make_params(0.5, 2.0);
  const auto grid = make_log_grid(1.0, 2e4, 16, 2.0);
  const auto table = mixture_tail(p, grid, 1e-10);
  EXPECT_NO_THROW(validate(table));
  const int k_max = mixture_truncation_index(p, 1e-10);
  double remainder_mass = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    remainder_mass += 0.5 * std::pow(0.5, k) * fixed_k_return_distribution(2.0, k, 20000).remainder;
  }
  EXPECT_LE(table.survival.back(), *table.truncation_bound + remainder_mass + 1e-15);
}

TEST(MixtureTail, IndependentOfWorkerCount) {
  const auto p = make_params(0.4, 2.5);
  const auto grid = make_log_grid(1.0, 5000, 8, 2.5);
  const auto one = mixture_tail(p, grid, 1e-12, 1);
  const auto four = mixture_tail(p, grid, 1e-12, 4);
  EXPECT_EQ(one.survival, four.survival);
}

TEST(MixtureTail, Errors) {
  const auto p = make_params(0.5, 2.0);
  EXPECT_THROW(mixture_tail(p, {}, 1e-12), EmptyInputError);
  EXPECT_THROW(mixture_tail(p, {2.0, 1.0}, 1e-12), DomainError);
  EXPECT_THROW(mixture_tail(p, {1.0, 2.0}, 0.0), DomainError);
}

TEST(CountTail, MatchesDirectSum) {
  const auto p = make_params(0.5, 2.0);
  // P[N > 0] = sum_k w_k P_k[A] P_k[B]
  double direct = 0.0;
  for (int k = 2; k <= 60; ++k) {
    direct += 0.5 * std::pow(0.5, k) * reach_far_end_prob(2.0, k) * return_before_zero_prob(2.0, k);
  }
  EXPECT_NEAR(count_tail(p, 0.0).value, direct, 1e-14);
  EXPECT_NEAR(count_tail(p, 0.7).value, direct, 1e-14);
  EXPECT_GT(count_tail(p, 10).value, count_tail(p, 100).value);
}
