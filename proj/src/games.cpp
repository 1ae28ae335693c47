#include "unifx/games.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "unifx/error.hpp"
#include "unifx/rng.hpp"

namespace unifx {

struct LazyGame::Cache {
  std::mutex mu;
  std::unordered_map<std::uint32_t, double> values;
};

LazyGame::LazyGame(int d, GameKind kind, Payoff payoff)
    : d_(d), kind_(kind), payoff_(std::move(payoff)), cache_(std::make_shared<Cache>()) {
  if (d < 0 || d > kMaxFeatures) throw InvalidArgument("game dimension outside [0, 25]");
  if (!payoff_) throw InvalidArgument("game needs a payoff function");
}

double LazyGame::operator()(Coalition s) const {
  if (s.dim() != d_) {
    throw InvalidArgument("coalition over d=" + std::to_string(s.dim()) + " used with a game over d=" +
                          std::to_string(d_));
  }
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->values.find(s.bits());
    if (it != cache_->values.end()) return it->second;
  }
  const double v = payoff_(s);
  if (!std::isfinite(v)) throw NumericError("game value at {" + s.to_string() + "} is not finite");
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->values.try_emplace(s.bits(), v).first->second;
}

std::uint64_t LazyGame::evaluations() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->values.size();
}

GameTensor LazyGame::materialize(const Progress& progress) const {
  const std::size_t n = std::size_t{1} << d_;
  std::vector<double> values(n);
  for (std::size_t b = 0; b < n; ++b) {
    values[b] = (*this)(Coalition(static_cast<std::uint32_t>(b), d_));
    if (progress) progress(b + 1, n);
  }
  return GameTensor(d_, std::move(values), kind_);
}

const char* to_string(Loss loss) { return loss == Loss::squared ? "squared" : "log"; }

namespace {

void check_point(const ValueFunction& vf, std::size_t len, const char* what) {
  if (static_cast<int>(len) != vf.dim()) {
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(len) + ", expected " +
                          std::to_string(vf.dim()));
  }
}

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
  return v;
}

}  // namespace

LazyGame lazy_local_game(const ValueFunction& vf, std::span<const double> x0) {
  check_point(vf, x0.size(), "x0");
  std::vector<double> x(x0.begin(), x0.end());
  return LazyGame(vf.dim(), GameKind::local, [vf, x](Coalition s) { return vf(s, x); });
}

LazyGame lazy_sensitivity_game(const ValueFunction& vf, const Eigen::MatrixXd& points) {
  if (points.rows() < 2) throw InvalidArgument("sensitivity game needs at least 2 evaluation points");
  check_point(vf, static_cast<std::size_t>(points.cols()), "evaluation point");
  auto rows = std::make_shared<std::vector<std::vector<double>>>();
  for (Eigen::Index r = 0; r < points.rows(); ++r) rows->push_back(row_of(points, r));
  return LazyGame(vf.dim(), GameKind::sensitivity, [vf, rows](Coalition s) {
    if (s.is_empty()) return 0.0;
    const std::size_t n = rows->size();
    std::vector<double> f(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = vf(s, (*rows)[k]);
      mean += f[k];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : f) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(n - 1);
  });
}

LazyGame lazy_risk_game(const ValueFunction& vf, const Dataset& data, Loss loss) {
  if (!data.y) throw InvalidArgument("risk game needs labels (a final column named y)");
  if (data.rows() == 0) throw InvalidArgument("risk game needs at least one row");
  check_point(vf, static_cast<std::size_t>(data.dim()), "dataset row");
  if (loss == Loss::log) {
    for (Eigen::Index k = 0; k < data.y->size(); ++k) {
      const double y = (*data.y)(k);
      if (y != 0.0 && y != 1.0) {
        throw InvalidArgument("log loss needs labels in {0, 1}; row " + std::to_string(k + 1) + " has " +
                              std::to_string(y));
      }
    }
  }
  auto rows = std::make_shared<std::vector<std::vector<double>>>();
  for (Eigen::Index r = 0; r < data.x.rows(); ++r) rows->push_back(row_of(data.x, r));
  auto labels = std::make_shared<Eigen::VectorXd>(*data.y);
  return LazyGame(vf.dim(), GameKind::risk, [vf, rows, labels, loss](Coalition s) {
    double total = 0.0;
    for (std::size_t k = 0; k < rows->size(); ++k) {
      const double pred = vf(s, (*rows)[k]);
      const double y = (*labels)(static_cast<Eigen::Index>(k));
      if (loss == Loss::squared) {
        total += (pred - y) * (pred - y);
      } else {
        const double p = std::clamp(pred, kLogLossClamp, 1.0 - kLogLossClamp);
        total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
      }
    }
    return -total / static_cast<double>(rows->size());
  });
}

GameTensor local_game(const ValueFunction& vf, std::span<const double> x0, const Progress& progress) {
  return lazy_local_game(vf, x0).materialize(progress);
}

GameTensor sensitivity_game(const ValueFunction& vf, const Eigen::MatrixXd& points, const Progress& progress) {
  return lazy_sensitivity_game(vf, points).materialize(progress);
}

GameTensor risk_game(const ValueFunction& vf, const Dataset& data, Loss loss, const Progress& progress) {
  return lazy_risk_game(vf, data, loss).materialize(progress);
}

GameTensor normalized(const GameTensor& game) {
  std::vector<double> v(game.values().begin(), game.values().end());
  const double base = v[0];
  for (double& e : v) e -= base;
  return GameTensor(game.dim(), std::move(v), game.kind());
}

InteractionValues fanova_decomposition(const GameTensor& local) {
  if (local.kind() != GameKind::local && local.kind() != GameKind::raw) {
    throw InvalidArgument("fANOVA decomposition needs a local game, got a " + std::string(to_string(local.kind())) +
                          " game");
  }
  const int d = local.dim();
  const GameTensor m = moebius_transform(local);
  InteractionValues out(IndexKind::moebius, d, std::max(d, 1));
  out.baseline_value = m.at(0);
  for (std::uint32_t b = 1; b < m.size(); ++b) out.set(Coalition(b, d), m.at(b));
  return out;
}

Eigen::MatrixXd sample_eval_points(const GaussianSpec& spec, std::size_t n, std::uint64_t seed) {
  return sample(spec, n, seed, StreamPurpose::eval_points);
}

Dataset make_synthetic_dataset(const ModelExpr& model, const GaussianSpec& spec, std::size_t n,
                               double noise_variance, std::uint64_t seed) {
  if (model.dim() != spec.dim()) throw InvalidArgument("model and distribution dimensions differ");
  if (!(noise_variance >= 0.0)) throw InvalidArgument("noise variance must be non-negative");
  Dataset ds;
  ds.x = sample(spec, n, seed, StreamPurpose::eval_points);
  ds.y = Eigen::VectorXd(static_cast<Eigen::Index>(n));
  const CounterRng noise(seed, StreamPurpose::noise);
  const double sd = std::sqrt(noise_variance);
  for (std::size_t k = 0; k < n; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    const std::vector<double> x = row_of(ds.x, r);
    (*ds.y)(r) = model.evaluate(x) + sd * noise.normal(k);
  }
  for (int i = 1; i <= spec.dim(); ++i) ds.column_names.push_back("x" + std::to_string(i));
  return ds;
}

}  // namespace unifx
