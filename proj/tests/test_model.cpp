#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "traptail/model.hpp"

using namespace traptail;

TEST(MakeParams, ComputesRho) {
  EXPECT_DOUBLE_EQ(make_params(0.5, 2.0).rho(), 1.0);
  EXPECT_DOUBLE_EQ(make_params(0.25, 2.0).rho(), 2.0);
  const auto p = make_params(0.3, 3.0);
  EXPECT_EQ(p.rho(), -std::log(0.3) / std::log(3.0));
  EXPECT_EQ(p.log_alpha(), std::log(0.3));
  EXPECT_EQ(p.log_beta(), std::log(3.0));
}

TEST(MakeParams, RejectsOutOfRange) {
  EXPECT_THROW(make_params(0.5, 1.0), DomainError);
  EXPECT_THROW(make_params(0.5, 0.5), DomainError);
  EXPECT_THROW(make_params(0.0, 2.0), DomainError);
  EXPECT_THROW(make_params(1.0, 2.0), DomainError);
  EXPECT_THROW(make_params(1.2, 2.0), DomainError);
  EXPECT_THROW(make_params(std::nan(""), 2.0), DomainError);
  EXPECT_THROW(make_params(0.5, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(ExpectedExcursionFixed, Examples) {
  EXPECT_EQ(expected_excursion_fixed(2.0, 0), 0.0);
  EXPECT_EQ(expected_excursion_fixed(7.5, 0), 0.0);
  EXPECT_DOUBLE_EQ(expected_excursion_fixed(2.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(expected_excursion_fixed(2.0, 3), 14.0);
  EXPECT_DOUBLE_EQ(expected_excursion_fixed(3.0, 4), 80.0);
}

TEST(ExpectedExcursionFixed, NearOneStaysAccurate) {
  // 2 (b^k - 1)/(b - 1) -> 2k as b -> 1
  EXPECT_NEAR(expected_excursion_fixed(1.0 + 1e-12, 5), 10.0, 1e-9);
}

TEST(ExpectedExcursionFixed, OverflowIsAnError) {
  EXPECT_THROW(expected_excursion_fixed(2.0, 2000), OverflowError);
  EXPECT_THROW(expected_excursion_fixed(2.0, -1), DomainError);
}

TEST(ExpectedExcursion, MixtureRegimes) {
  const auto m = expected_excursion(make_params(0.3, 2.0));
  ASSERT_TRUE(is_finite(m.mean));
  EXPECT_NEAR(std::get<double>(m.mean), 1.5, 1e-15);
  EXPECT_FALSE(m.second_moment_finite);

  const auto boundary = expected_excursion(make_params(0.5, 2.0));
  EXPECT_FALSE(is_finite(boundary.mean));
  EXPECT_TRUE(std::holds_alternative<Infinite>(boundary.mean));

  EXPECT_TRUE(expected_excursion(make_params(0.2, 2.0)).second_moment_finite);
}

TEST(ReachFarEnd, Examples) {
  EXPECT_EQ(reach_far_end_prob(2.0, 1), 1.0);
  EXPECT_NEAR(reach_far_end_prob(2.0, 2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(reach_far_end_prob(2.0, 60), 0.5, 1e-15);
  EXPECT_GT(reach_far_end_prob(2.0, 30), 0.5);
  EXPECT_THROW(reach_far_end_prob(2.0, 0), DomainError);
}

TEST(ReturnBeforeZero, Examples) {
  EXPECT_EQ(return_before_zero_prob(2.0, 1), 0.0);
  EXPECT_NEAR(return_before_zero_prob(2.0, 2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(return_before_zero_prob(3.0, 2), 0.75, 1e-15);
  EXPECT_THROW(return_before_zero_prob(2.0, 0), DomainError);
}

TEST(ExcursionCountMean, Examples) {
  const auto p = make_params(0.3, 2.0);
  EXPECT_NEAR(std::get<double>(excursion_count_mean(p, 2)), 2.0, 1e-15);
  EXPECT_EQ(std::get<double>(excursion_count_mean(p, 1)), 0.0);
  EXPECT_NEAR(std::get<double>(excursion_count_mean(p)), 0.45, 1e-15);
  EXPECT_TRUE(std::holds_alternative<Infinite>(excursion_count_mean(make_params(0.5, 2.0))));
  EXPECT_NEAR(std::get<double>(excursion_count_mean(make_params(0.5, 3.0), 3)), 12.0, 1e-12);
}

TEST(ExcursionCountMean, MatchesGeometricLaw) {
  // E[N | A] = (1 - q)/q for the geometric law with success probability q.
  for (int k = 2; k <= 12; ++k) {
    const double q = excursion_escape_prob(2.0, k);
    EXPECT_NEAR(std::get<double>(excursion_count_mean(make_params(0.5, 2.0), k)), (1.0 - q) / q, 1e-9 * k);
  }
}

TEST(FreeWalkMgf, Examples) {
  const FreeWalkReturnTime w(2.0);
  EXPECT_DOUBLE_EQ(w.mgf(0.0), 1.0);
  EXPECT_DOUBLE_EQ(free_walk_return_mgf(2.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(w.mean(), 4.0);
  EXPECT_DOUBLE_EQ(w.variance(), 24.0);
  const double edge = std::log(3.0 / (2.0 * std::sqrt(2.0)));
  EXPECT_NEAR(w.lambda_max(), edge, 1e-15);
  EXPECT_NEAR(w.mgf(w.lambda_max()), 1.5, 1e-7);
  EXPECT_THROW(w.mgf(edge + 1e-9), DomainError);
  EXPECT_THROW(free_walk_return_mgf(1.0, 0.0), DomainError);
}

TEST(FreeWalkMgf, DerivativesMatchMoments) {
  for (double beta : {1.5, 2.0, 3.0, 8.0}) {
    const FreeWalkReturnTime w(beta);
    const double h = 1e-5;
    const double d1 = (w.mgf(h) - w.mgf(-h)) / (2.0 * h);
    EXPECT_NEAR(d1 / w.mean(), 1.0, 1e-6) << beta;
    const double h2 = 1e-4;
    const double d2 = (w.mgf(h2) - 2.0 * w.mgf(0.0) + w.mgf(-h2)) / (h2 * h2);
    EXPECT_NEAR((d2 - w.mean() * w.mean()) / w.variance(), 1.0, 1e-3) << beta;
  }
}

TEST(FreeWalkMgf, IncreasingAndConvex) {
  const FreeWalkReturnTime w(2.0);
  const double top = w.lambda_max();
  double prev = w.mgf(-2.0), prev_slope = -1.0;
  for (int i = 1; i <= 400; ++i) {
    const double l = -2.0 + (top + 2.0) * i / 400.0;
    const double v = w.mgf(l);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, prev);
    const double slope = (v - prev) / ((top + 2.0) / 400.0);
    EXPECT_GE(slope, prev_slope * (1.0 - 1e-9));
    prev = v;
    prev_slope = slope;
  }
}

TEST(ConditionedUpProb, Examples) {
  EXPECT_EQ(conditioned_up_prob(WalkKind::ConditionedToZero, 2.0, 5, 4), 0.0);
  EXPECT_EQ(conditioned_up_prob(WalkKind::ConditionedToK, 2.0, 5, 1), 1.0);
  EXPECT_EQ(conditioned_up_prob(WalkKind::ConditionedToK, 3.7, 9, 1), 1.0);
  EXPECT_NEAR(conditioned_up_prob(WalkKind::ConditionedToK, 2.0, 3, 2), 7.0 / 9.0, 1e-15);
  EXPECT_NEAR(conditioned_up_prob(WalkKind::Free, 2.0, 0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(conditioned_up_prob(WalkKind::FreeReversed, 2.0, 0, 0), 1.0 / 3.0, 1e-15);
}

TEST(ConditionedUpProb, RejectsSitesOutsideTheTrap) {
  EXPECT_THROW(conditioned_up_prob(WalkKind::ConditionedToZero, 2.0, 5, 0), DomainError);
  EXPECT_THROW(conditioned_up_prob(WalkKind::ConditionedToZero, 2.0, 5, 5), DomainError);
  EXPECT_THROW(conditioned_up_prob(WalkKind::ConditionedToK, 2.0, 1, 1), DomainError);
  EXPECT_THROW(conditioned_up_prob(WalkKind::ConditionedToK, 2.0, 0, 1), DomainError);
}

TEST(ConditionedUpProb, MatchesDirectHTransform) {
  // p(l, l+1) h(l+1) / h(l) with h(l) = P_l[hit target first], straight from
  // the gambler's-ruin formula in long double.
  for (double beta : {1.5, 2.0, 4.0}) {
    const long double b = beta, up = b / (1 + b);
    for (int k = 2; k <= 12; ++k) {
      auto ruin_to_k = [&](int l) { return (1 - std::pow(b, -(long double)l)) / (1 - std::pow(b, -(long double)k)); };
      for (int l = 1; l <= k - 1; ++l) {
        const long double to_k = up * ruin_to_k(l + 1) / ruin_to_k(l);
        const long double to_zero = up * (1 - ruin_to_k(l + 1)) / (1 - ruin_to_k(l));
        EXPECT_NEAR(conditioned_up_prob(WalkKind::ConditionedToK, beta, k, l), (double)to_k, 1e-14);
        EXPECT_NEAR(conditioned_up_prob(WalkKind::ConditionedToZero, beta, k, l), (double)to_zero, 1e-14);
      }
    }
  }
}

TEST(ExcursionBounds, Values) {
  const auto b = conditioned_excursion_bounds(2.0, 2);
  EXPECT_DOUBLE_EQ(b.mean_upper, 4.0);
  EXPECT_DOUBLE_EQ(b.mean_lower, 4.0 - 12.0 * 2.0 * 0.25);
  EXPECT_DOUBLE_EQ(b.variance_upper, 24.0);
  EXPECT_DOUBLE_EQ(b.mgf_curvature, 40.0);
  EXPECT_DOUBLE_EQ(final_descent_mean_bound(2.0, 3), 9.0);
  EXPECT_THROW(conditioned_excursion_bounds(2.0, 1), DomainError);
}

TEST(WalkKind, Names) {
  EXPECT_STREQ(to_string(WalkKind::ConditionedToK), "conditioned-to-k");
  EXPECT_STREQ(to_string(WalkKind::Free), "free");
}
