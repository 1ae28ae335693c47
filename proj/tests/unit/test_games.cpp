#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "unifx/error.hpp"
#include "unifx/games.hpp"

using namespace unifx;

namespace {

ValueFunction marginal_vf(const char* text, int d, GaussianSpec spec) {
  ImputerConfig c;
  c.kind = ImputerKind::marginal;
  c.background = std::move(spec);
  return ValueFunction(parse_model(text, d), c);
}

}  // namespace

TEST(LocalGame, ThreeIntValues) {
  const ValueFunction vf = marginal_vf("x1 + x2 + x3 + x1*x2 + x1*x2*x3", 3, GaussianSpec::standard(3));
  const GameTensor g = local_game(vf, std::vector<double>{1, 1, 1});
  EXPECT_EQ(g.kind(), GameKind::local);
  EXPECT_NEAR(g(Coalition::empty(3)), 0.0, 1e-15);
  EXPECT_NEAR(g(Coalition::singleton(1, 3)), 1.0, 1e-15);
  EXPECT_NEAR(g(Coalition::of({1, 2}, 3)), 3.0, 1e-15);
  EXPECT_NEAR(g(Coalition::full(3)), 5.0, 1e-15);
}

TEST(LocalGame, BaselineLinear) {
  ImputerConfig c;
  c.kind = ImputerKind::baseline;
  c.baseline = std::vector<double>(4, 0.0);
  const ValueFunction vf(parse_model("2*x1 + 2*x2 + 2*x3", 4), c);
  const GameTensor g = local_game(vf, std::vector<double>(4, 1.0));
  for (std::uint32_t b = 0; b < 16; ++b) {
    EXPECT_DOUBLE_EQ(g.at(b), 2.0 * std::popcount(b & 0b0111u)) << b;
  }
}

TEST(LazyGame, MemoisesAndCounts) {
  int calls = 0;
  const LazyGame g(3, GameKind::raw, [&](Coalition s) {
    ++calls;
    return double(s.bits());
  });
  EXPECT_EQ(g(Coalition::singleton(2, 3)), 2.0);
  EXPECT_EQ(g(Coalition::singleton(2, 3)), 2.0);
  const LazyGame copy = g;
  EXPECT_EQ(copy(Coalition::singleton(2, 3)), 2.0);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(g.evaluations(), 1u);
  std::size_t last = 0;
  const GameTensor t = g.materialize([&](std::size_t done, std::size_t total) {
    EXPECT_EQ(total, 8u);
    last = done;
  });
  EXPECT_EQ(last, 8u);
  EXPECT_EQ(calls, 8);
  EXPECT_EQ(t.at(5), 5.0);
}

TEST(LazyGame, ThreadSafe) {
  std::atomic<int> calls{0};
  const LazyGame g(6, GameKind::raw, [&](Coalition s) {
    calls.fetch_add(1);
    return double(s.size());
  });
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&] {
      for (std::uint32_t b = 0; b < 64; ++b) g(Coalition(b, 6));
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(g.evaluations(), 64u);
}

TEST(LazyGame, RejectsNonFinitePayoff) {
  const LazyGame g(1, GameKind::raw, [](Coalition) { return std::nan(""); });
  EXPECT_THROW(g(Coalition::empty(1)), NumericError);
}

TEST(SensitivityGame, SampleVarianceOnSharedPoints) {
  const ValueFunction vf = marginal_vf("2*x1 + 3*x2", 2, GaussianSpec::standard(2));
  Eigen::MatrixXd pts(3, 2);
  pts << 0, 1, 1, -1, 2, 0;
  const GameTensor g = sensitivity_game(vf, pts);
  EXPECT_EQ(g.at(0), 0.0);
  EXPECT_NEAR(g.at(0b01), 4.0 * 1.0, 1e-14);        // var(0,1,2) = 1
  EXPECT_NEAR(g.at(0b10), 9.0 * 1.0, 1e-14);        // var(1,-1,0) = 1
  EXPECT_NEAR(g.at(0b11), 4 + 9 + 2 * 6 * -0.5, 1e-14);  // cov = -0.5
  EXPECT_THROW(sensitivity_game(vf, Eigen::MatrixXd::Zero(1, 2)), InvalidArgument);
}

TEST(SensitivityGame, LinearModelLargeSample) {
  const ValueFunction vf = marginal_vf("2*x1 + 2*x2 + 2*x3", 4, GaussianSpec::standard(4));
  const Eigen::MatrixXd pts = sample_eval_points(GaussianSpec::standard(4), 20000, 1);
  const GameTensor g = sensitivity_game(vf, pts);
  for (std::uint32_t b = 0; b < 16; ++b) {
    const double target = 4.0 * std::popcount(b & 0b0111u);
    EXPECT_NEAR(g.at(b), target, 4 * target * std::sqrt(2.0 / 20000) + 1e-12) << b;
  }
}

TEST(RiskGame, SquaredAndLogLoss) {
  ImputerConfig c;
  c.kind = ImputerKind::baseline;
  c.baseline = std::vector<double>{0.0};
  const ValueFunction vf(parse_model("x1", 1), c);
  const Dataset data = parse_dataset("x1,y\n1,0\n0.5,1\n");
  const GameTensor sq = risk_game(vf, data, Loss::squared);
  EXPECT_NEAR(sq.at(1), -(1.0 + 0.25) / 2, 1e-15);
  EXPECT_NEAR(sq.at(0), -(0.0 + 1.0) / 2, 1e-15);
  const GameTensor lg = risk_game(vf, data, Loss::log);
  EXPECT_NEAR(lg.at(1), -(-std::log(1.0 - (1.0 - kLogLossClamp)) - std::log(0.5)) / 2, 1e-12);
  EXPECT_THROW(risk_game(vf, parse_dataset("x1,y\n1,2\n"), Loss::log), InvalidArgument);
  EXPECT_THROW(risk_game(vf, parse_dataset("x1\n1\n"), Loss::squared), InvalidArgument);
}

TEST(Games, NormalizedAndFanova) {
  const GameTensor g(2, {2.0, 3.0, 5.0, 10.0}, GameKind::local);
  const GameTensor n = normalized(g);
  EXPECT_EQ(n.at(0), 0.0);
  EXPECT_EQ(n.at(3), 8.0);
  const InteractionValues f = fanova_decomposition(g);
  EXPECT_EQ(*f.baseline_value, 2.0);
  EXPECT_EQ(f.get(Coalition::of({1, 2}, 2)), 10.0 - 3.0 - 5.0 + 2.0);
  EXPECT_THROW(fanova_decomposition(GameTensor(1, {0, 1}, GameKind::risk)), InvalidArgument);
}

TEST(SyntheticData, NoiseVariance) {
  const Dataset ds = make_synthetic_dataset(parse_model("x1 + x2", 2), GaussianSpec::standard(2), 50000, 0.01, 4);
  ASSERT_TRUE(ds.y.has_value());
  double ss = 0.0;
  for (Eigen::Index k = 0; k < ds.x.rows(); ++k) {
    const double e = (*ds.y)(k) - ds.x(k, 0) - ds.x(k, 1);
    ss += e * e;
  }
  EXPECT_NEAR(ss / 50000, 0.01, 4 * 0.01 * std::sqrt(2.0 / 50000));
  EXPECT_EQ(ds.column_names, (std::vector<std::string>{"x1", "x2"}));
}
