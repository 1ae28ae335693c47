#pragma once

// Independent reference values for testing: bivariate closed forms,
// a direct Moebius double loop, the local-explanation weight table and the
// equicorrelated linear result. Nothing here is used by the main path.

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "unifx/coalition.hpp"
#include "unifx/gaussian.hpp"

namespace unifx::oracle {

enum class Family { lin, two_int, three_int, add };
enum class Kind { b, m, c };

struct OracleCase {
  Family family = Family::lin;
  Kind kind = Kind::b;
  // lin: {b1, b2}; two_int: {b1, b2, b12}. three_int and add use fixed
  // coefficients and ignore beta.
  std::vector<double> beta;
  std::vector<double> baseline;  // kind b
  GaussianSpec spec;             // kinds m, c
};

int case_dim(Family family);
std::string model_text(const OracleCase& c);

// The fANOVA effect f_S(x) written out per family and kind.
double closed_form_effect(const OracleCase& c, Coalition s, std::span<const double> x);

// O(4^d) direct double loop; d <= 12.
GameTensor naive_moebius(const GameTensor& game);

// Rows: (individual, joint, interaction) x (pure, partial, full); columns:
// weights on the effects of x1, x2, x1x2, x1x2x3.
Eigen::Matrix<double, 9, 4> table3_reference();
std::array<std::string, 9> table3_row_labels();

// Full c-fANOVA effect nu(D) - nu(-i) of beta_i x_i under an equicorrelated
// standard Gaussian, at the all-ones point.
double equicorrelated_full_effect_lin(double rho, int d, double beta_i);

}  // namespace unifx::oracle
