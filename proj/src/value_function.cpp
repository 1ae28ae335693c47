#include "unifx/value_function.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "unifx/error.hpp"
#include "unifx/rng.hpp"

namespace unifx {

const char* to_string(ImputerKind kind) {
  switch (kind) {
    case ImputerKind::baseline: return "baseline";
    case ImputerKind::marginal: return "marginal";
    case ImputerKind::conditional: return "conditional";
  }
  return "baseline";
}

const char* to_string(EstimationMode mode) {
  return mode == EstimationMode::exact_moments ? "exact" : "mc";
}

struct ValueFunction::Impl {
  ModelExpr model;
  ImputerConfig config;
  EstimationMode mode = EstimationMode::monte_carlo;
  MonomialMap monomials;
  std::vector<double> baseline;
  Eigen::MatrixXd background;  // shared rows for marginal Monte Carlo
  const GaussianSpec* gaussian = nullptr;
  mutable std::atomic<std::uint64_t> model_calls{0};
  mutable std::atomic<std::uint64_t> calls{0};
  mutable std::atomic<bool> degenerate{false};

  Impl(ModelExpr m, ImputerConfig c) : model(std::move(m)), config(std::move(c)), monomials(model.dim()) {}

  double f(std::span<const double> x) const {
    model_calls.fetch_add(1, std::memory_order_relaxed);
    return model.evaluate(x);
  }
};

namespace {

std::uint64_t hash_values(std::span<const double> v) {
  std::uint64_t h = 0x243F6A8885A308D3ull;
  for (double d : v) {
    if (d == 0.0) d = 0.0;  // fold -0.0
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(d));
  }
  return h;
}

Estimate mean_with_error(double sum, double sum_sq_dev, std::size_t n) {
  Estimate e;
  e.value = sum / static_cast<double>(n);
  e.std_error = n > 1 ? std::sqrt(sum_sq_dev / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return e;
}

// Mean of F over rows, each row filling the coordinates listed in fill.
template <typename RowFn>
Estimate average(const ValueFunction::Impl& impl, std::span<const double> x, const std::vector<int>& fill,
                 std::size_t n, RowFn row) {
  std::vector<double> z(x.begin(), x.end());
  std::vector<double> vals(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < fill.size(); ++a) z[static_cast<std::size_t>(fill[a] - 1)] = row(k, a);
    vals[k] = impl.f(z);
    sum += vals[k];
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  return mean_with_error(sum, ss, n);
}

std::vector<double> pick(std::span<const double> x, const std::vector<int>& features) {
  std::vector<double> out;
  out.reserve(features.size());
  for (int f : features) out.push_back(x[static_cast<std::size_t>(f - 1)]);
  return out;
}

}  // namespace

ValueFunction::ValueFunction(ModelExpr model, ImputerConfig config)
    : impl_(std::make_shared<Impl>(std::move(model), std::move(config))) {
  Impl& im = *impl_;
  const int d = im.model.dim();
  const ImputerConfig& c = im.config;

  if (const auto* g = std::get_if<GaussianSpec>(&c.background)) {
    if (g->dim() != d) {
      throw ConfigError("distribution dimension " + std::to_string(g->dim()) + " does not match model d=" +
                        std::to_string(d));
    }
    im.gaussian = g;
  } else if (const auto* ds = std::get_if<Dataset>(&c.background)) {
    if (ds->dim() != d) {
      throw ConfigError("dataset has " + std::to_string(ds->dim()) + " feature columns, model d=" +
                        std::to_string(d));
    }
    if (ds->rows() == 0) throw ConfigError("background dataset is empty");
  }

  im.monomials = im.model.expand();
  const bool exact_ok = im.gaussian != nullptr && im.monomials.degree() <= kMaxMomentDegree;

  switch (c.kind) {
    case ImputerKind::baseline: {
      if (c.baseline) {
        im.baseline = *c.baseline;
      } else if (im.gaussian) {
        im.baseline.assign(im.gaussian->mu.data(), im.gaussian->mu.data() + d);
      } else if (const auto* ds = std::get_if<Dataset>(&c.background)) {
        const Eigen::VectorXd means = ds->x.colwise().mean().transpose();
        im.baseline.assign(means.data(), means.data() + d);
      } else {
        throw ConfigError("baseline imputer needs a baseline vector or a background distribution");
      }
      if (static_cast<int>(im.baseline.size()) != d) {
        throw ConfigError("baseline has length " + std::to_string(im.baseline.size()) + ", expected " +
                          std::to_string(d));
      }
      im.mode = EstimationMode::exact_moments;
      break;
    }
    case ImputerKind::marginal:
    case ImputerKind::conditional: {
      if (std::holds_alternative<std::monostate>(c.background)) {
        throw ConfigError(std::string(to_string(c.kind)) + " imputer needs a background distribution");
      }
      if (c.kind == ImputerKind::conditional && im.gaussian == nullptr) {
        throw ConfigError("conditional imputer requires a Gaussian distribution");
      }
      if (c.mode == EstimationMode::exact_moments && !exact_ok) {
        throw ConfigError("exact mode requires a Gaussian distribution and a polynomial of degree <= " +
                          std::to_string(kMaxMomentDegree));
      }
      im.mode = c.mode.value_or(exact_ok ? EstimationMode::exact_moments : EstimationMode::monte_carlo);
      if (im.mode == EstimationMode::monte_carlo) {
        if (c.mc_samples == 0) throw ConfigError("mc_samples must be positive");
        if (c.kind == ImputerKind::marginal) {
          if (im.gaussian) {
            im.background = sample(*im.gaussian, c.mc_samples, c.seed, StreamPurpose::background);
          } else {
            const Dataset& ds = std::get<Dataset>(c.background);
            if (ds.rows() <= c.mc_samples) {
              im.background = ds.x;
            } else {
              // Seeded partial Fisher-Yates: the first mc_samples positions.
              std::vector<std::uint32_t> order(ds.rows());
              for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
              RngCursor cur(CounterRng(c.seed, StreamPurpose::subsample));
              for (std::size_t i = 0; i < c.mc_samples; ++i) {
                const std::size_t j = i + cur.below(static_cast<std::uint32_t>(order.size() - i));
                std::swap(order[i], order[j]);
              }
              im.background.resize(static_cast<Eigen::Index>(c.mc_samples), d);
              for (std::size_t i = 0; i < c.mc_samples; ++i) {
                im.background.row(static_cast<Eigen::Index>(i)) = ds.x.row(order[i]);
              }
            }
          }
        }
      }
      break;
    }
  }
}

int ValueFunction::dim() const noexcept { return impl_->model.dim(); }
ImputerKind ValueFunction::kind() const noexcept { return impl_->config.kind; }
EstimationMode ValueFunction::mode() const noexcept { return impl_->mode; }
const ModelExpr& ValueFunction::model() const noexcept { return impl_->model; }
const ImputerConfig& ValueFunction::config() const noexcept { return impl_->config; }
std::span<const double> ValueFunction::baseline() const noexcept { return impl_->baseline; }
std::uint64_t ValueFunction::model_calls() const noexcept { return impl_->model_calls.load(); }
std::uint64_t ValueFunction::calls() const noexcept { return impl_->calls.load(); }
bool ValueFunction::degenerate() const noexcept { return impl_->degenerate.load(); }

void ValueFunction::reset_counters() const noexcept {
  impl_->model_calls.store(0);
  impl_->calls.store(0);
}

Estimate ValueFunction::estimate(Coalition s, std::span<const double> x) const {
  const Impl& im = *impl_;
  const int d = im.model.dim();
  if (static_cast<int>(x.size()) != d) {
    throw InvalidArgument("value function over d=" + std::to_string(d) + " evaluated at a point of length " +
                          std::to_string(x.size()));
  }
  if (s.dim() != d) throw InvalidArgument("coalition dimension does not match the value function");
  im.calls.fetch_add(1, std::memory_order_relaxed);

  if (s == Coalition::full(d)) return Estimate{im.f(x), std::nullopt};

  if (im.config.kind == ImputerKind::baseline) {
    std::vector<double> z(im.baseline);
    for (int i : s.features()) z[static_cast<std::size_t>(i - 1)] = x[static_cast<std::size_t>(i - 1)];
    return Estimate{im.f(z), std::nullopt};
  }

  const std::vector<int> in = s.features();
  const std::vector<int> out = s.complement().features();

  if (im.mode == EstimationMode::exact_moments) {
    // Substitute x on S, integrate the rest with Gaussian moments.
    GaussianSpec marginal_spec;
    const GaussianSpec* over = im.gaussian;
    std::vector<int> free_features;
    if (im.config.kind == ImputerKind::conditional) {
      ConditionalGaussian cond = conditional(*im.gaussian, s, pick(x, in), true);
      if (cond.pseudo_inverse) im.degenerate.store(true);
      marginal_spec = std::move(cond.spec);
      over = &marginal_spec;
      free_features = std::move(cond.free_features);
    }
    double total = 0.0;
    std::vector<int> kappa;
    for (const auto& [exps, coef] : im.monomials.terms()) {
      double term = coef;
      for (int i : in) {
        for (int k = 0; k < exps[static_cast<std::size_t>(i - 1)]; ++k) term *= x[static_cast<std::size_t>(i - 1)];
      }
      if (term == 0.0) continue;
      if (im.config.kind == ImputerKind::conditional) {
        kappa.assign(free_features.size(), 0);
        for (std::size_t a = 0; a < free_features.size(); ++a) {
          kappa[a] = exps[static_cast<std::size_t>(free_features[a] - 1)];
        }
      } else {
        kappa.assign(exps.begin(), exps.end());
        for (int i : in) kappa[static_cast<std::size_t>(i - 1)] = 0;
      }
      total += term * gaussian_moment(*over, kappa);
    }
    return Estimate{total, std::nullopt};
  }

  if (im.config.kind == ImputerKind::marginal) {
    const Eigen::MatrixXd& bg = im.background;
    return average(im, x, out, static_cast<std::size_t>(bg.rows()),
                   [&](std::size_t k, std::size_t a) { return bg(static_cast<Eigen::Index>(k), out[a] - 1); });
  }

  const std::vector<double> x_s = pick(x, in);
  ConditionalGaussian cond = conditional(*im.gaussian, s, x_s, true);
  if (cond.pseudo_inverse) im.degenerate.store(true);
  const std::uint64_t stream = splitmix64(static_cast<std::uint64_t>(s.bits()) ^ hash_values(x_s));
  const Eigen::MatrixXd draws =
      sample(cond.spec, im.config.mc_samples, im.config.seed, StreamPurpose::conditional, stream);
  return average(im, x, out, im.config.mc_samples,
                 [&](std::size_t k, std::size_t a) { return draws(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)); });
}

ValueFunction make_value_function(const ModelExpr& model, const ImputerConfig& config) {
  return ValueFunction(model, config);
}

double baseline_value(const ModelExpr& model, Coalition s, std::span<const double> x, std::span<const double> b) {
  if (static_cast<int>(x.size()) != model.dim() || static_cast<int>(b.size()) != model.dim()) {
    throw InvalidArgument("baseline_value: x and b must both have length " + std::to_string(model.dim()));
  }
  std::vector<double> z(b.begin(), b.end());
  for (int i : s.features()) z[static_cast<std::size_t>(i - 1)] = x[static_cast<std::size_t>(i - 1)];
  return model.evaluate(z);
}

double marginal_value(const ModelExpr& model, Coalition s, std::span<const double> x, const ImputerConfig& config) {
  ImputerConfig c = config;
  c.kind = ImputerKind::marginal;
  return ValueFunction(model, std::move(c))(s, x);
}

double conditional_value(const ModelExpr& model, Coalition s, std::span<const double> x,
                         const ImputerConfig& config) {
  ImputerConfig c = config;
  c.kind = ImputerKind::conditional;
  return ValueFunction(model, std::move(c))(s, x);
}

}  // namespace unifx
