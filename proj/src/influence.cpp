#include "unifx/influence.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "unifx/error.hpp"
#include "unifx/rng.hpp"

namespace unifx {

const char* to_string(Effect effect) {
  switch (effect) {
    case Effect::pure: return "pure";
    case Effect::partial: return "partial";
    case Effect::full: return "full";
  }
  return "pure";
}

const char* to_string(InfluenceType type) {
  switch (type) {
    case InfluenceType::individual: return "individual";
    case InfluenceType::joint: return "joint";
    case InfluenceType::interaction: return "interaction";
  }
  return "individual";
}

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_target(const GameTensor& game, Coalition s) {
  if (s.dim() != game.dim()) throw InvalidArgument("coalition dimension does not match the game");
  if (s.is_empty()) throw InvalidArgument("target coalition must be non-empty");
}

// Weight 1/((d - s + 1) C(d - s, t)) of a context T of size t outside S.
double context_weight(int d, int s, int t) { return 1.0 / ((d - s + 1) * binom(d - s, t)); }

}  // namespace

InteractionValues shapley_value(const GameTensor& game, ShapleyRoute route) {
  const int d = game.dim();
  if (d < 1) throw InvalidArgument("Shapley values need at least one feature");
  InteractionValues out(IndexKind::sv, d, 1);
  out.baseline_value = game.at(0);
  const std::uint32_t n = static_cast<std::uint32_t>(game.size());
  std::vector<double> phi(static_cast<std::size_t>(d), 0.0);
  if (route == ShapleyRoute::moebius) {
    const GameTensor m = moebius_transform(game);
    for (std::uint32_t t = 1; t < n; ++t) {
      const double share = m.at(t) / std::popcount(t);
      for (int i = 0; i < d; ++i) {
        if ((t >> i) & 1u) phi[static_cast<std::size_t>(i)] += share;
      }
    }
  } else {
    for (int i = 0; i < d; ++i) {
      const std::uint32_t bit = 1u << i;
      for (std::uint32_t t = 0; t < n; ++t) {
        if (t & bit) continue;
        phi[static_cast<std::size_t>(i)] += context_weight(d, 1, std::popcount(t)) * (game.at(t | bit) - game.at(t));
      }
    }
  }
  for (int i = 0; i < d; ++i) out.set(Coalition::singleton(i + 1, d), phi[static_cast<std::size_t>(i)]);
  return out;
}

double generalized_value(const GameTensor& game, Coalition s, ShapleyRoute route) {
  check_target(game, s);
  const int d = game.dim();
  const std::uint32_t sb = s.bits();
  const std::uint32_t n = static_cast<std::uint32_t>(game.size());
  double total = 0.0;
  if (route == ShapleyRoute::moebius) {
    const GameTensor m = moebius_transform(game);
    for (std::uint32_t t = 1; t < n; ++t) {
      if (t & sb) total += m.at(t) / (std::popcount(t & ~sb) + 1);
    }
  } else {
    for (std::uint32_t t = 0; t < n; ++t) {
      if (t & sb) continue;
      total += context_weight(d, s.size(), std::popcount(t)) * (game.at(t | sb) - game.at(t));
    }
  }
  return total;
}

double shapley_interaction_index(const GameTensor& game, Coalition s, ShapleyRoute route) {
  check_target(game, s);
  const int d = game.dim();
  const std::uint32_t sb = s.bits();
  const std::uint32_t n = static_cast<std::uint32_t>(game.size());
  double total = 0.0;
  if (route == ShapleyRoute::moebius) {
    const GameTensor m = moebius_transform(game);
    for (std::uint32_t t = 1; t < n; ++t) {
      if ((t & sb) == sb) total += m.at(t) / (std::popcount(t & ~sb) + 1);
    }
  } else {
    for (std::uint32_t t = 0; t < n; ++t) {
      if (t & sb) continue;
      total += context_weight(d, s.size(), std::popcount(t)) * alternating_sum(game, s, Coalition(t, d));
    }
  }
  return total;
}

std::vector<double> bernoulli_numbers(int n) {
  std::vector<double> b(static_cast<std::size_t>(std::max(n, 0)) + 1, 0.0);
  b[0] = 1.0;
  for (int m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += binom(m + 1, j) * b[static_cast<std::size_t>(j)];
    b[static_cast<std::size_t>(m)] = -acc / (m + 1);
  }
  return b;
}

InteractionValues k_sii(const GameTensor& game, int k) {
  const int d = game.dim();
  if (k < 1 || k > d) {
    throw InvalidArgument("k-SII order " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  }
  const GameTensor m = moebius_transform(game);
  const std::uint32_t n = static_cast<std::uint32_t>(game.size());
  // SII of every coalition up to order k.
  std::vector<double> sii(n, 0.0);
  for (std::uint32_t s = 1; s < n; ++s) {
    if (std::popcount(s) > k) continue;
    double total = 0.0;
    const std::uint32_t rest = (n - 1) & ~s;
    for (std::uint32_t extra = rest;; extra = (extra - 1) & rest) {
      total += m.at(s | extra) / (std::popcount(extra) + 1);
      if (extra == 0) break;
    }
    sii[s] = total;
  }
  const std::vector<double> bern = bernoulli_numbers(k);
  InteractionValues out(IndexKind::k_sii, d, k);
  out.baseline_value = game.at(0);
  for (std::uint32_t s = 1; s < n; ++s) {
    const int size = std::popcount(s);
    if (size > k) continue;
    double total = 0.0;
    const std::uint32_t rest = (n - 1) & ~s;
    for (std::uint32_t extra = rest;; extra = (extra - 1) & rest) {
      const int e = std::popcount(extra);
      if (size + e <= k) total += bern[static_cast<std::size_t>(e)] * sii[s | extra];
      if (extra == 0) break;
    }
    out.set(Coalition(s, d), total);
  }
  return out;
}

Estimate shapley_value_sampled(const std::function<double(Coalition)>& game, int d, int i,
                               std::size_t permutations, std::uint64_t seed) {
  if (permutations == 0) throw InvalidArgument("permutation count must be at least 1");
  if (d < 1 || d > kMaxFeatures) throw InvalidArgument("feature count outside [1, 25]");
  if (i < 1 || i > d) throw InvalidArgument("feature index " + std::to_string(i) + " outside [1, " + std::to_string(d) + "]");
  std::vector<int> order(static_cast<std::size_t>(d));
  std::vector<double> deltas(permutations);
  for (std::size_t p = 0; p < permutations; ++p) {
    std::iota(order.begin(), order.end(), 1);
    RngCursor cur(CounterRng(seed, StreamPurpose::permutation, p));
    for (int a = d - 1; a > 0; --a) {
      const auto b = static_cast<int>(cur.below(static_cast<std::uint32_t>(a + 1)));
      std::swap(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
    }
    std::uint32_t prefix = 0;
    for (int f : order) {
      if (f == i) break;
      prefix |= 1u << (f - 1);
    }
    const Coalition t(prefix, d);
    deltas[p] = game(t.with(i)) - game(t);
  }
  const double mean = std::accumulate(deltas.begin(), deltas.end(), 0.0) / static_cast<double>(permutations);
  double ss = 0.0;
  for (double v : deltas) ss += (v - mean) * (v - mean);
  Estimate e;
  e.value = mean;
  e.std_error = permutations > 1
                    ? std::sqrt(ss / static_cast<double>(permutations - 1) / static_cast<double>(permutations))
                    : 0.0;
  return e;
}

namespace {

void require_sensitivity(const GameTensor& game) {
  if (game.kind() != GameKind::sensitivity) {
    throw InvalidArgument("variance measures need a sensitivity game, got a " + std::string(to_string(game.kind())) +
                          " game");
  }
}

}  // namespace

SobolIndices sobol_indices(const GameTensor& sensitivity, Coalition s, bool normalized) {
  require_sensitivity(sensitivity);
  if (s.dim() != sensitivity.dim()) throw InvalidArgument("coalition dimension does not match the game");
  const int d = sensitivity.dim();
  SobolIndices out;
  out.closed = sensitivity(s) - sensitivity(Coalition::empty(d));
  out.total = sensitivity(Coalition::full(d)) - sensitivity(s.complement());
  if (normalized) {
    const double var = sensitivity(Coalition::full(d));
    if (var == 0.0) throw NumericError("cannot normalise Sobol indices: total variance is zero");
    out.closed /= var;
    out.total /= var;
  }
  return out;
}

double superset_measure(const GameTensor& sensitivity, Coalition s) {
  require_sensitivity(sensitivity);
  if (s.dim() != sensitivity.dim()) throw InvalidArgument("coalition dimension does not match the game");
  return alternating_sum(sensitivity, s, s.complement());
}

HStatistic h_statistic(const ValueFunction& vf, const Eigen::MatrixXd& points, int i, int j) {
  const int d = vf.dim();
  if (i < 1 || i > d || j < 1 || j > d || i == j) {
    throw InvalidArgument("H-statistic needs two distinct features in [1, " + std::to_string(d) + "]");
  }
  if (points.rows() < 2) throw InvalidArgument("H-statistic needs at least 2 evaluation points");
  if (points.cols() != d) throw InvalidArgument("evaluation points have the wrong dimension");
  const Coalition ci = Coalition::singleton(i, d);
  const Coalition cj = Coalition::singleton(j, d);
  const Coalition cij = ci | cj;
  const Coalition empty = Coalition::empty(d);
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<double> inter(n), joint(n);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < n; ++k) {
    for (int c = 0; c < d; ++c) x[static_cast<std::size_t>(c)] = points(static_cast<Eigen::Index>(k), c);
    const double fij = vf(cij, x);
    joint[k] = fij;
    inter[k] = fij - vf(ci, x) - vf(cj, x) + vf(empty, x);
  }
  auto variance = [n](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    return ss / static_cast<double>(n - 1);
  };
  const double denom = variance(joint);
  if (denom < kHStatisticFloor) return HStatistic{0.0, true};
  return HStatistic{variance(inter) / denom, false};
}

}  // namespace unifx
