#pragma once

// Pure, partial and full effects for individual, joint and interaction
// influence, plus the variance-based measures of the sensitivity game.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "unifx/coalition.hpp"
#include "unifx/value_function.hpp"

namespace unifx {

enum class Effect { pure, partial, full };
enum class InfluenceType { individual, joint, interaction };

const char* to_string(Effect effect);
const char* to_string(InfluenceType type);

// Alternating sum over L subset S of nu(T u L).
template <typename Game>
double alternating_sum(const Game& game, Coalition s, Coalition t) {
  double total = 0.0;
  const int s_size = s.size();
  for (Coalition l : subsets_of(s)) {
    total += ((s_size - l.size()) % 2 == 0 ? 1.0 : -1.0) * game(t | l);
  }
  return total;
}

// Individual/joint: nu(S) - nu(empty), two evaluations. Interaction: the
// Moebius value m(S), 2^|S| evaluations.
template <typename Game>
double pure_effect(const Game& game, Coalition s, InfluenceType type) {
  if (type == InfluenceType::interaction) return alternating_sum(game, s, Coalition::empty(s.dim()));
  return game(s) - game(Coalition::empty(s.dim()));
}

// Individual/joint: nu(D) - nu(-S), two evaluations. Interaction: the
// discrete derivative of S in the presence of -S, 2^|S| evaluations.
template <typename Game>
double full_effect(const Game& game, Coalition s, InfluenceType type) {
  if (type == InfluenceType::interaction) return alternating_sum(game, s, s.complement());
  return game(Coalition::full(s.dim())) - game(s.complement());
}

enum class ShapleyRoute { moebius, marginal_contributions };

InteractionValues shapley_value(const GameTensor& game, ShapleyRoute route = ShapleyRoute::moebius);

// Shapley generalized value of the coalition S (joint partial effect).
double generalized_value(const GameTensor& game, Coalition s, ShapleyRoute route = ShapleyRoute::moebius);

// Shapley interaction index of S (interaction partial effect).
double shapley_interaction_index(const GameTensor& game, Coalition s,
                                 ShapleyRoute route = ShapleyRoute::moebius);

// k-Shapley values: SII of every |S| <= k aggregated with Bernoulli numbers.
InteractionValues k_sii(const GameTensor& game, int k);

// Bernoulli numbers with B_1 = -1/2.
std::vector<double> bernoulli_numbers(int n);

// Permutation-sampling estimate of the Shapley value of feature i.
Estimate shapley_value_sampled(const std::function<double(Coalition)>& game, int d, int i,
                               std::size_t permutations, std::uint64_t seed);

struct SobolIndices {
  double closed = 0.0;
  double total = 0.0;
};

SobolIndices sobol_indices(const GameTensor& sensitivity, Coalition s, bool normalized = false);

// Sum of the variance components of all supersets of S.
double superset_measure(const GameTensor& sensitivity, Coalition s);

inline constexpr double kHStatisticFloor = 1e-12;

struct HStatistic {
  double value = 0.0;
  bool degenerate = false;  // Var[F_ij] below the floor; value set to 0
};

// Var[F_ij - F_i - F_j + F_empty] / Var[F_ij] over the rows of points.
HStatistic h_statistic(const ValueFunction& vf, const Eigen::MatrixXd& points, int i, int j);

}  // namespace unifx
