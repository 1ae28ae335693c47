#include <gtest/gtest.h>

#include "statistical_checks.hpp"

using namespace unifx;

TEST(Statistical, MonteCarloValueFunctionsMatchExactMoments) {
  const auto r = stats::mc_vs_exact(1, 200);
  EXPECT_LE(r.worst_z, 5.0) << r.detail;
}

TEST(Statistical, SampledShapleyWithinThreeStandardErrors) {
  const auto r = stats::sampled_shapley(2);
  EXPECT_LE(r.worst_z, 3.0) << r.detail;
}

TEST(Statistical, RiskOfFullModelIsNoiseLevel) {
  const auto r = stats::risk_noise_level(3);
  EXPECT_LE(r.worst_z, 3.0) << r.detail;
}

TEST(Statistical, HStatisticOfPureProduct) {
  const auto r = stats::h_statistic_product(4);
  EXPECT_LE(r.worst_abs, 0.02) << r.detail;
}
