#include <gtest/gtest.h>

#include <random>

#include "test_helpers.hpp"
#include "unifx/coalition.hpp"
#include "unifx/error.hpp"

using namespace unifx;

TEST(Coalition, BitsAndFeatures) {
  const Coalition s = Coalition::of({1, 3}, 4);
  EXPECT_EQ(s.bits(), 0b0101u);
  EXPECT_EQ(s.size(), 2);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.features(), (std::vector<int>{1, 3}));
  EXPECT_EQ(s.to_string(), "1+3");
  EXPECT_EQ(s.complement(), Coalition::of({2, 4}, 4));
  EXPECT_EQ(Coalition::full(3).bits(), 0b111u);
  EXPECT_EQ(Coalition::empty(3).to_string(), "");
}

TEST(Coalition, SetOperations) {
  const Coalition a = Coalition::of({1, 2}, 3);
  const Coalition b = Coalition::of({2, 3}, 3);
  EXPECT_EQ(a | b, Coalition::full(3));
  EXPECT_EQ(a & b, Coalition::singleton(2, 3));
  EXPECT_EQ(a - b, Coalition::singleton(1, 3));
  EXPECT_TRUE(Coalition::singleton(2, 3).is_subset_of(a));
  EXPECT_EQ(a.with(3), Coalition::full(3));
  EXPECT_EQ(a.without(1), Coalition::singleton(2, 3));
}

TEST(Coalition, RejectsBadInput) {
  EXPECT_THROW(Coalition::singleton(0, 3), InvalidArgument);
  EXPECT_THROW(Coalition::singleton(4, 3), InvalidArgument);
  EXPECT_THROW(Coalition(0b1000u, 3), InvalidArgument);
  EXPECT_THROW(Coalition::full(kMaxFeatures + 1), InvalidArgument);
  EXPECT_THROW(Coalition::of({1}, 2) | Coalition::of({1}, 3), InvalidArgument);
}

TEST(Coalition, Enumeration) {
  const auto subs = subsets_of(Coalition::of({1, 3}, 3));
  ASSERT_EQ(subs.size(), 4u);
  EXPECT_EQ(subs[0].bits(), 0u);
  EXPECT_EQ(subs[3].bits(), 0b101u);
  const auto pairs = coalitions_of_size(4, 2);
  EXPECT_EQ(pairs.size(), 6u);
  for (const auto& p : pairs) EXPECT_EQ(p.size(), 2);
  EXPECT_TRUE(std::is_sorted(pairs.begin(), pairs.end(),
                             [](Coalition a, Coalition b) { return a.bits() < b.bits(); }));
}

TEST(Coalition, CanonicalOrderIsBySizeThenBits) {
  CanonicalOrder less;
  EXPECT_TRUE(less(Coalition::of({3}, 3), Coalition::of({1, 2}, 3)));
  EXPECT_TRUE(less(Coalition::of({1, 2}, 3), Coalition::of({1, 3}, 3)));
}

TEST(GameTensor, ShapeChecks) {
  EXPECT_THROW(GameTensor(2, {1.0, 2.0, 3.0}), InvalidArgument);
  EXPECT_THROW(GameTensor(1, {0.0, std::nan("")}), NumericError);
  const GameTensor t(2, {0, 1, 2, 3});
  EXPECT_EQ(t(Coalition::of({1, 2}, 2)), 3.0);
}

// F_3int = x1 + x2 + x3 + x1x2 + x1x2x3 at (1,1,1), independent standard normal.
GameTensor three_int_local_game() {
  std::vector<double> v(8);
  for (std::uint32_t s = 0; s < 8; ++s) {
    const bool a = s & 1, b = s & 2, c = s & 4;
    v[s] = a + b + c + (a && b) + (a && b && c);
  }
  return GameTensor(3, v, GameKind::local);
}

TEST(Moebius, ThreeIntLocalGame) {
  const GameTensor m = moebius_transform(three_int_local_game());
  const double expected[8] = {0, 1, 1, 1, 1, 0, 0, 1};
  for (std::uint32_t s = 0; s < 8; ++s) EXPECT_NEAR(m.at(s), expected[s], 1e-15) << s;
}

TEST(Moebius, CoMoebiusOfFeatureOne) {
  const GameTensor cm = co_moebius_transform(three_int_local_game());
  EXPECT_NEAR(cm(Coalition::singleton(1, 3)), 3.0, 1e-15);
}

TEST(Moebius, DiscreteDerivative) {
  const GameTensor v = three_int_local_game();
  // Delta_{12}(empty) = m(12); Delta_{1}({2,3}) = nu(D) - nu({2,3}).
  EXPECT_NEAR(discrete_derivative(v, Coalition::of({1, 2}, 3), Coalition::empty(3)), 1.0, 1e-15);
  EXPECT_NEAR(discrete_derivative(v, Coalition::singleton(1, 3), Coalition::of({2, 3}, 3)), 3.0, 1e-15);
  EXPECT_THROW(discrete_derivative(v, Coalition::of({1, 2}, 3), Coalition::of({2}, 3)), InvalidArgument);
}

TEST(Moebius, HandlesLargeDimension) {
  std::mt19937_64 gen(7);
  const GameTensor v = testutil::random_tensor(16, gen);
  const GameTensor back = zeta_transform(moebius_transform(v));
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(back.at(i) - v.at(i)));
  EXPECT_LT(err, 1e-9);
}

TEST(InteractionValues, StoresByCanonicalOrder) {
  InteractionValues iv(IndexKind::k_sii, 3, 2);
  iv.set(Coalition::of({1, 2}, 3), 2.0);
  iv.set(Coalition::of({3}, 3), 1.0);
  EXPECT_EQ(iv.entries().begin()->first, Coalition::of({3}, 3));
  EXPECT_EQ(iv.get(Coalition::of({1, 3}, 3)), 0.0);
  EXPECT_THROW(iv.set(Coalition::full(3), 1.0), InvalidArgument);
  EXPECT_THROW(iv.set(Coalition::empty(3), 1.0), InvalidArgument);
}
