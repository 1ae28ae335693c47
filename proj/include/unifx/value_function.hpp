#pragma once

// Imputation-based value functions F_S(x): the model with the features
// outside S replaced by a baseline point, the marginal distribution, or the
// conditional distribution given x_S.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "unifx/coalition.hpp"
#include "unifx/gaussian.hpp"
#include "unifx/model.hpp"

namespace unifx {

enum class ImputerKind { baseline, marginal, conditional };
enum class EstimationMode { monte_carlo, exact_moments };

const char* to_string(ImputerKind kind);
const char* to_string(EstimationMode mode);

using Background = std::variant<std::monostate, Dataset, GaussianSpec>;

struct ImputerConfig {
  ImputerKind kind = ImputerKind::marginal;
  // Baseline point b; when unset, the background mean (mu, or the dataset
  // column means) is used.
  std::optional<std::vector<double>> baseline;
  Background background;
  std::size_t mc_samples = 512;
  std::uint64_t seed = 0;
  // Unset: exact moments when the background is Gaussian and the model has
  // degree <= 8, Monte Carlo otherwise.
  std::optional<EstimationMode> mode;
};

struct Estimate {
  double value = 0.0;
  std::optional<double> std_error;  // Monte Carlo only
};

class ValueFunction {
 public:
  ValueFunction(ModelExpr model, ImputerConfig config);

  int dim() const noexcept;
  ImputerKind kind() const noexcept;
  EstimationMode mode() const noexcept;
  const ModelExpr& model() const noexcept;
  const ImputerConfig& config() const noexcept;
  // Baseline point actually in use (baseline imputer only).
  std::span<const double> baseline() const noexcept;

  double operator()(Coalition s, std::span<const double> x) const { return estimate(s, x).value; }
  Estimate estimate(Coalition s, std::span<const double> x) const;

  std::uint64_t model_calls() const noexcept;
  std::uint64_t calls() const noexcept;
  // True once any conditioning block had to be pseudo-inverted.
  bool degenerate() const noexcept;
  void reset_counters() const noexcept;

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

ValueFunction make_value_function(const ModelExpr& model, const ImputerConfig& config);

double baseline_value(const ModelExpr& model, Coalition s, std::span<const double> x,
                      std::span<const double> b);
double marginal_value(const ModelExpr& model, Coalition s, std::span<const double> x,
                      const ImputerConfig& config);
double conditional_value(const ModelExpr& model, Coalition s, std::span<const double> x,
                         const ImputerConfig& config);

}  // namespace unifx
