#pragma once

// Explanation games over coalitions of D: local prediction, variance
// (sensitivity) and negative risk.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>

#include "unifx/coalition.hpp"
#include "unifx/gaussian.hpp"
#include "unifx/value_function.hpp"

namespace unifx {

using Progress = std::function<void(std::size_t done, std::size_t total)>;

// A game evaluated on demand and memoised per coalition. Copies share the
// cache and the evaluation counter.
class LazyGame {
 public:
  using Payoff = std::function<double(Coalition)>;

  LazyGame(int d, GameKind kind, Payoff payoff);

  int dim() const noexcept { return d_; }
  GameKind kind() const noexcept { return kind_; }

  double operator()(Coalition s) const;
  // Distinct coalitions evaluated so far.
  std::uint64_t evaluations() const;

  GameTensor materialize(const Progress& progress = {}) const;

 private:
  struct Cache;
  int d_;
  GameKind kind_;
  Payoff payoff_;
  std::shared_ptr<Cache> cache_;
};

enum class Loss { squared, log };

const char* to_string(Loss loss);

inline constexpr double kLogLossClamp = 1e-12;

LazyGame lazy_local_game(const ValueFunction& vf, std::span<const double> x0);
// Unbiased (n - 1) sample variance of F_S over the shared rows of points.
LazyGame lazy_sensitivity_game(const ValueFunction& vf, const Eigen::MatrixXd& points);
// -(1/n) sum_k loss(F_S(x_k), y_k).
LazyGame lazy_risk_game(const ValueFunction& vf, const Dataset& data, Loss loss);

GameTensor local_game(const ValueFunction& vf, std::span<const double> x0, const Progress& progress = {});
GameTensor sensitivity_game(const ValueFunction& vf, const Eigen::MatrixXd& points, const Progress& progress = {});
GameTensor risk_game(const ValueFunction& vf, const Dataset& data, Loss loss, const Progress& progress = {});

// nu(S) - nu(empty) for every S.
GameTensor normalized(const GameTensor& game);

// Moebius transform of a local game: the fANOVA effects f_S(x0).
InteractionValues fanova_decomposition(const GameTensor& local);

Eigen::MatrixXd sample_eval_points(const GaussianSpec& spec, std::size_t n, std::uint64_t seed);

// Features from spec, labels F(x) + N(0, noise_variance).
Dataset make_synthetic_dataset(const ModelExpr& model, const GaussianSpec& spec, std::size_t n,
                               double noise_variance, std::uint64_t seed);

}  // namespace unifx
