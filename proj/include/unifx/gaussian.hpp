#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unifx/coalition.hpp"
#include "unifx/rng.hpp"

namespace unifx {

struct GaussianSpec {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  // Validates shapes, finiteness, symmetry (1e-12) and positive
  // semi-definiteness; throws InvalidArgument or NumericError.
  static GaussianSpec create(Eigen::VectorXd mu, Eigen::MatrixXd sigma);
  // Unit diagonal, constant off-diagonal rho.
  static GaussianSpec equicorrelated(int d, double rho, double mean = 0.0);
  static GaussianSpec standard(int d);

  int dim() const noexcept { return static_cast<int>(mu.size()); }
  bool is_diagonal() const;
};

// Pivot tolerance relative to max(1, max diagonal entry).
inline constexpr double kCholeskyTolerance = 1e-8;

// Lower-triangular L with L L^T = sigma. Pivots within the tolerance of zero
// are zeroed together with their column (PSD but singular input); a pivot
// below -tolerance raises NumericError.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma);

// n x d matrix with rows mu + L z, z drawn from the given stream.
Eigen::MatrixXd sample(const GaussianSpec& spec, std::size_t n, std::uint64_t seed,
                       StreamPurpose purpose = StreamPurpose::sample, std::uint64_t stream = 0);

struct ConditionalGaussian {
  GaussianSpec spec;                // over the free features, ascending
  std::vector<int> free_features;   // 1-based indices of -S
  bool pseudo_inverse = false;      // singular conditioning block was pseudo-inverted
};

// Distribution of X_{-S} given X_S = x_s (x_s ordered by ascending feature
// index). A singular Sigma_SS throws NumericError unless allow_pseudo_inverse.
ConditionalGaussian conditional(const GaussianSpec& spec, Coalition s, std::span<const double> x_s,
                                bool allow_pseudo_inverse = false);

inline constexpr int kMaxMomentDegree = 8;

// E[prod_i X_i^kappa_i] via binomial expansion around mu and Wick pairings.
double gaussian_moment(const GaussianSpec& spec, std::span<const int> kappa);

struct Dataset {
  Eigen::MatrixXd x;
  std::optional<Eigen::VectorXd> y;
  std::vector<std::string> column_names;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
  int dim() const noexcept { return static_cast<int>(x.cols()); }
};

// Comma-separated with a header row; a final column named "y" holds labels.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(std::string_view text, const std::string& source = "<memory>");

}  // namespace unifx
