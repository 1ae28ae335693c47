#include "unifx/oracle.hpp"

#include <bit>
#include <cmath>

#include "unifx/error.hpp"

namespace unifx::oracle {

namespace {

[[noreturn]] void unsupported(const std::string& what) { throw InvalidArgument("oracle: unsupported case, " + what); }

// Bivariate lin / 2int, one line per table cell.
double bivariate(const OracleCase& c, Coalition s, std::span<const double> x) {
  const double b1 = c.beta.at(0);
  const double b2 = c.beta.at(1);
  const double b12 = c.family == Family::two_int ? c.beta.at(2) : 0.0;
  const std::uint32_t bits = s.bits();

  if (c.kind == Kind::b) {
    const double q1 = c.baseline.at(0);
    const double q2 = c.baseline.at(1);
    switch (bits) {
      case 0b00: return b1 * q1 + b2 * q2 + b12 * q1 * q2;
      case 0b01: return b1 * (x[0] - q1) + b12 * q2 * (x[0] - q1);
      case 0b10: return b2 * (x[1] - q2) + b12 * q1 * (x[1] - q2);
      case 0b11: return b12 * (x[0] - q1) * (x[1] - q2);
    }
  }

  const double mu1 = c.spec.mu(0);
  const double mu2 = c.spec.mu(1);
  const double v1 = c.spec.sigma(0, 0);
  const double v2 = c.spec.sigma(1, 1);
  const double s12 = c.spec.sigma(0, 1);
  const double xb1 = x[0] - mu1;
  const double xb2 = x[1] - mu2;

  if (c.kind == Kind::m) {
    switch (bits) {
      case 0b00: return b1 * mu1 + b2 * mu2 + b12 * (s12 + mu1 * mu2);
      case 0b01: return b1 * xb1 + b12 * mu2 * xb1 - b12 * s12;
      case 0b10: return b2 * xb2 + b12 * mu1 * xb2 - b12 * s12;
      case 0b11: return b12 * xb1 * xb2 + b12 * s12;
    }
  }

  switch (bits) {
    case 0b00: return b1 * mu1 + b2 * mu2 + b12 * (s12 + mu1 * mu2);
    case 0b01: return b1 * xb1 + xb1 * b2 * s12 / v1 + b12 * xb1 * (mu2 + s12 * x[0] / v1) - b12 * s12;
    case 0b10: return b2 * xb2 + xb2 * b1 * s12 / v2 + b12 * xb2 * (mu1 + s12 * x[1] / v2) - b12 * s12;
    case 0b11:
      return b12 * xb1 * xb2 + b12 * s12 - (xb1 * b2 * s12 / v1 + xb2 * b1 * s12 / v2) -
             b12 * s12 * (xb1 * x[0] / v1 + xb2 * x[1] / v2);
  }
  unsupported("coalition");
}

// x1 + x2 + x3 + x1x2 + x1x2x3 is multilinear; with centre q the effect of S
// collects every monomial L containing S as prod_{S}(x - q) prod_{L\S} q.
double three_int(const OracleCase& c, Coalition s, std::span<const double> x) {
  std::array<double, 3> q{};
  if (c.kind == Kind::b) {
    for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] = c.baseline.at(static_cast<std::size_t>(i));
  } else {
    if (!c.spec.is_diagonal()) unsupported("three_int needs independent features for kinds m and c");
    for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] = c.spec.mu(i);
  }
  const std::array<std::uint32_t, 5> monomials{0b001, 0b010, 0b100, 0b011, 0b111};
  double total = 0.0;
  for (std::uint32_t l : monomials) {
    if ((l & s.bits()) != s.bits()) continue;
    double term = 1.0;
    for (int i = 0; i < 3; ++i) {
      if (!((l >> i) & 1u)) continue;
      term *= ((s.bits() >> i) & 1u) ? x[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(i)]
                                     : q[static_cast<std::size_t>(i)];
    }
    total += term;
  }
  return total;
}

// 2 x1 + x2^2 + x3^3: main effects only.
double additive(const OracleCase& c, Coalition s, std::span<const double> x) {
  auto g = [](int i, double v) {
    switch (i) {
      case 0: return 2.0 * v;
      case 1: return v * v;
      case 2: return v * v * v;
    }
    return 0.0;
  };
  auto expected = [&](int i) {
    if (c.kind == Kind::b) return g(i, c.baseline.at(static_cast<std::size_t>(i)));
    const double mu = c.spec.mu(i);
    const double var = c.spec.sigma(i, i);
    switch (i) {
      case 0: return 2.0 * mu;
      case 1: return var + mu * mu;
      case 2: return mu * mu * mu + 3.0 * mu * var;
    }
    return 0.0;
  };
  if (c.kind == Kind::c && !c.spec.is_diagonal()) unsupported("add needs independent features for kind c");
  if (s.is_empty()) return expected(0) + expected(1) + expected(2);
  if (s.size() > 1) return 0.0;
  const int i = s.features().front() - 1;
  if (i > 2) return 0.0;
  return g(i, x[static_cast<std::size_t>(i)]) - expected(i);
}

}  // namespace

int case_dim(Family family) {
  switch (family) {
    case Family::lin:
    case Family::two_int: return 2;
    case Family::three_int: return 3;
    case Family::add: return 4;
  }
  return 2;
}

std::string model_text(const OracleCase& c) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", v);
    return std::string(buf);
  };
  switch (c.family) {
    case Family::lin: return num(c.beta.at(0)) + "*x1 + " + num(c.beta.at(1)) + "*x2";
    case Family::two_int:
      return num(c.beta.at(0)) + "*x1 + " + num(c.beta.at(1)) + "*x2 + " + num(c.beta.at(2)) + "*x1*x2";
    case Family::three_int: return "x1 + x2 + x3 + x1*x2 + x1*x2*x3";
    case Family::add: return "2*x1 + x2^2 + x3^3";
  }
  return "";
}

double closed_form_effect(const OracleCase& c, Coalition s, std::span<const double> x) {
  const int d = case_dim(c.family);
  if (s.dim() != d) unsupported("coalition dimension");
  if (static_cast<int>(x.size()) != d) unsupported("point dimension");
  if (c.kind == Kind::b && static_cast<int>(c.baseline.size()) != d) unsupported("missing baseline");
  if (c.kind != Kind::b && c.spec.dim() != d) unsupported("missing distribution");
  switch (c.family) {
    case Family::lin:
    case Family::two_int: return bivariate(c, s, x);
    case Family::three_int: return three_int(c, s, x);
    case Family::add: return additive(c, s, x);
  }
  unsupported("family");
}

GameTensor naive_moebius(const GameTensor& game) {
  const int d = game.dim();
  if (d > 12) throw InvalidArgument("naive Moebius is capped at d=12");
  const std::uint32_t n = 1u << d;
  std::vector<double> m(n, 0.0);
  for (std::uint32_t s = 0; s < n; ++s) {
    for (std::uint32_t t = 0; t < n; ++t) {
      if ((t & ~s) != 0) continue;
      const int sign = (std::popcount(s) - std::popcount(t)) % 2 == 0 ? 1 : -1;
      m[s] += sign * game.at(t);
    }
  }
  return GameTensor(d, std::move(m), GameKind::raw);
}

Eigen::Matrix<double, 9, 4> table3_reference() {
  const double w = 0.5;  // weight of one extra feature, 1/(1+1)
  Eigen::Matrix<double, 9, 4> t;
  // individual {1}
  t.row(0) << 1, 0, 0, 0;
  t.row(1) << 1, 0, 0.5, 1.0 / 3.0;
  t.row(2) << 1, 0, 1, 1;
  // joint {1,2}
  t.row(3) << 1, 1, 1, 0;
  t.row(4) << 1, 1, 1, w;
  t.row(5) << 1, 1, 1, 1;
  // interaction {1,2}
  t.row(6) << 0, 0, 1, 0;
  t.row(7) << 0, 0, 1, w;
  t.row(8) << 0, 0, 1, 1;
  return t;
}

std::array<std::string, 9> table3_row_labels() {
  return {"individual,pure", "individual,partial", "individual,full", "joint,pure",      "joint,partial",
          "joint,full",      "interaction,pure",   "interaction,partial", "interaction,full"};
}

double equicorrelated_full_effect_lin(double rho, int d, double beta_i) {
  if (d < 2) throw InvalidArgument("equicorrelated oracle needs d >= 2");
  if (!(rho > -1.0 / (d - 1)) || !(rho <= 1.0)) {
    throw InvalidArgument("rho=" + std::to_string(rho) + " does not give a valid equicorrelated covariance");
  }
  return beta_i * (1.0 - (d - 1) * rho / (1.0 + (d - 2) * rho));
}

}  // namespace unifx::oracle
