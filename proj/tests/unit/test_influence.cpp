#include <gtest/gtest.h>

#include <cmath>

#include "unifx/aliases.hpp"
#include "unifx/error.hpp"
#include "unifx/games.hpp"
#include "unifx/influence.hpp"

using namespace unifx;

namespace {

GameTensor three_int_game() {
  ImputerConfig c;
  c.kind = ImputerKind::marginal;
  c.background = GaussianSpec::standard(3);
  const ValueFunction vf(parse_model("x1 + x2 + x3 + x1*x2 + x1*x2*x3", 3), c);
  return local_game(vf, std::vector<double>{1, 1, 1});
}

double sample_variance(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).square().sum() / double(v.size() - 1);
}

const Coalition one = Coalition::singleton(1, 3);
const Coalition pair = Coalition::of({1, 2}, 3);

}  // namespace

TEST(Effects, PureOnThreeInt) {
  const GameTensor g = three_int_game();
  EXPECT_NEAR(pure_effect(g, one, InfluenceType::individual), 1.0, 1e-12);
  EXPECT_NEAR(pure_effect(g, pair, InfluenceType::joint), 3.0, 1e-12);
  EXPECT_NEAR(pure_effect(g, pair, InfluenceType::interaction), 1.0, 1e-12);
}

TEST(Effects, FullOnThreeInt) {
  const GameTensor g = three_int_game();
  EXPECT_NEAR(full_effect(g, one, InfluenceType::individual), 3.0, 1e-12);
  EXPECT_NEAR(full_effect(g, pair, InfluenceType::joint), 4.0, 1e-12);
  EXPECT_NEAR(full_effect(g, pair, InfluenceType::interaction), 2.0, 1e-12);
}

TEST(Effects, PartialOnThreeInt) {
  const GameTensor g = three_int_game();
  for (ShapleyRoute route : {ShapleyRoute::moebius, ShapleyRoute::marginal_contributions}) {
    EXPECT_NEAR(shapley_value(g, route).get(one), 11.0 / 6.0, 1e-12);
    EXPECT_NEAR(generalized_value(g, pair, route), 3.5, 1e-12);
    EXPECT_NEAR(shapley_interaction_index(g, pair, route), 1.5, 1e-12);
  }
}

TEST(Effects, PureAndFullUseTwoEvaluations) {
  const LazyGame g(5, GameKind::raw, [](Coalition s) { return double(s.bits() * s.bits()); });
  const Coalition s = Coalition::of({2, 4}, 5);
  pure_effect(g, s, InfluenceType::joint);
  EXPECT_EQ(g.evaluations(), 2u);
  const LazyGame h(5, GameKind::raw, [](Coalition s) { return double(s.bits()); });
  full_effect(h, Coalition::of({1, 2, 3}, 5), InfluenceType::interaction);
  EXPECT_EQ(h.evaluations(), 8u);
}

TEST(KSii, ThreeIntOrders) {
  const GameTensor g = three_int_game();
  const InteractionValues k1 = k_sii(g, 1);
  const InteractionValues sv = shapley_value(g);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_NEAR(k1.get(Coalition::singleton(i, 3)), sv.get(Coalition::singleton(i, 3)), 1e-12);
  }
  const InteractionValues k3 = k_sii(g, 3);
  const double expected[8] = {0, 1, 1, 1, 1, 0, 0, 1};
  double sum = 0.0;
  for (std::uint32_t b = 1; b < 8; ++b) {
    EXPECT_NEAR(k3.get(Coalition(b, 3)), expected[b], 1e-12) << b;
    sum += k3.get(Coalition(b, 3));
  }
  EXPECT_NEAR(sum, 5.0, 1e-12);
  EXPECT_THROW(k_sii(g, 0), InvalidArgument);
  EXPECT_THROW(k_sii(g, 4), InvalidArgument);
}

TEST(KSii, BernoulliNumbers) {
  const std::vector<double> b = bernoulli_numbers(6);
  ASSERT_EQ(b.size(), 7u);
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(b[1], -0.5);
  EXPECT_NEAR(b[2], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(b[3], 0.0, 1e-15);
  EXPECT_NEAR(b[4], -1.0 / 30.0, 1e-15);
  EXPECT_NEAR(b[6], 1.0 / 42.0, 1e-15);
}

TEST(Sobol, IndependentLinearAndTwoInt) {
  // Exact variance games of independent standard normal models.
  const GameTensor lin(3, {0, 4, 4, 8, 4, 8, 8, 12}, GameKind::sensitivity);
  const SobolIndices s = sobol_indices(lin, one);
  EXPECT_NEAR(s.closed, 4.0, 1e-12);
  EXPECT_NEAR(s.total, 4.0, 1e-12);
  const SobolIndices sn = sobol_indices(lin, one, true);
  EXPECT_NEAR(sn.closed, 1.0 / 3.0, 1e-12);
  // 2 x1 + 3 x2 + x1 x2: nu(1) = 4, nu(2) = 9, nu(12) = 14.
  const GameTensor two(2, {0, 4, 9, 14}, GameKind::sensitivity);
  const SobolIndices t = sobol_indices(two, Coalition::singleton(1, 2));
  EXPECT_NEAR(t.closed, 4.0, 1e-12);
  EXPECT_NEAR(t.total, 5.0, 1e-12);
  EXPECT_NEAR(superset_measure(two, Coalition::full(2)), 1.0, 1e-12);
  EXPECT_THROW(sobol_indices(GameTensor(2, {0, 1, 1, 2}, GameKind::local), Coalition::full(2)), InvalidArgument);
  EXPECT_THROW(sobol_indices(GameTensor::zeros(2, GameKind::sensitivity), Coalition::full(2), true), NumericError);
}

TEST(HStatistic, TwoIntMatchesSampleVarianceRatio) {
  ImputerConfig c;
  c.kind = ImputerKind::marginal;
  c.background = GaussianSpec::standard(2);
  const ValueFunction vf(parse_model("2*x1 + 2*x2 + x1*x2", 2), c);
  const Eigen::MatrixXd pts = sample_eval_points(GaussianSpec::standard(2), 20000, 3);
  const HStatistic h = h_statistic(vf, pts, 1, 2);
  const Eigen::VectorXd inter = pts.col(0).cwiseProduct(pts.col(1));
  const Eigen::VectorXd full = 2 * pts.col(0) + 2 * pts.col(1) + inter;
  EXPECT_NEAR(h.value, sample_variance(inter) / sample_variance(full), 1e-12);
  EXPECT_NEAR(h.value, 1.0 / 9.0, 0.01);
  EXPECT_FALSE(h.degenerate);
}

TEST(HStatistic, DegenerateWhenVarianceVanishes) {
  ImputerConfig c;
  c.kind = ImputerKind::marginal;
  c.background = GaussianSpec::standard(3);
  const ValueFunction vf(parse_model("x3", 3), c);
  const HStatistic h = h_statistic(vf, sample_eval_points(GaussianSpec::standard(3), 100, 1), 1, 2);
  EXPECT_TRUE(h.degenerate);
  EXPECT_EQ(h.value, 0.0);
  EXPECT_THROW(h_statistic(vf, sample_eval_points(GaussianSpec::standard(3), 100, 1), 1, 1), InvalidArgument);
}

TEST(SampledShapley, Validation) {
  auto game = [](Coalition s) { return double(s.size()); };
  EXPECT_THROW(shapley_value_sampled(game, 3, 1, 0, 1), InvalidArgument);
  EXPECT_THROW(shapley_value_sampled(game, 3, 4, 10, 1), InvalidArgument);
  const Estimate e = shapley_value_sampled(game, 3, 2, 50, 1);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  ASSERT_TRUE(e.std_error.has_value());
  EXPECT_DOUBLE_EQ(*e.std_error, 0.0);
}

TEST(Aliases, RegistryCells) {
  const MethodAlias& pfi = method_alias("pfi");
  EXPECT_EQ(pfi.game, GameKind::risk);
  EXPECT_EQ(pfi.imputers.front(), ImputerKind::marginal);
  EXPECT_EQ(pfi.effect, Effect::full);
  EXPECT_EQ(pfi.type, InfluenceType::individual);
  const MethodAlias& bshap = method_alias("bshap");
  EXPECT_EQ(bshap.game, GameKind::local);
  EXPECT_EQ(bshap.imputers.front(), ImputerKind::baseline);
  EXPECT_EQ(bshap.effect, Effect::partial);
  const MethodAlias& ups = method_alias("upsilon");
  EXPECT_EQ(ups.game, GameKind::sensitivity);
  EXPECT_EQ(ups.effect, Effect::full);
  EXPECT_EQ(ups.type, InfluenceType::interaction);
  try {
    method_alias("lime");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sage"), std::string::npos);
  }
}
