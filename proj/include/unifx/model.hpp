#pragma once

// Analytic polynomial models F: R^d -> R.
//
// Grammar (whitespace ignored, no implicit multiplication):
//   expr   := term (('+' | '-') term)*
//   term   := unary ('*' unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' INT)*
//   atom   := NUMBER | 'x' INT | '(' expr ')'

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace unifx {

class MonomialMap;

struct ExprNode {
  enum class Op { constant, variable, add, sub, mul, neg, pow };

  Op op = Op::constant;
  double value = 0.0;  // constant
  int index = 0;       // variable, 1-based
  int exponent = 0;    // pow
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

class ModelExpr {
 public:
  // Throws ParseError (with a character position) on syntax errors, on a
  // variable index outside [1, d], and on non-integer or negative powers.
  static ModelExpr parse(std::string_view text, int d);

  ModelExpr(ExprPtr root, int d);

  int dim() const noexcept { return d_; }
  const ExprPtr& root() const noexcept { return root_; }

  double evaluate(std::span<const double> x) const;

  // Re-parseable rendering; binary operations are parenthesised.
  std::string to_string() const;

  // Collapses constant subtrees into single constants.
  ModelExpr fold_constants() const;

  MonomialMap expand() const;

 private:
  ExprPtr root_;
  int d_;
};

// Fully distributed polynomial: exponent vector -> coefficient.
class MonomialMap {
 public:
  using Exponents = std::vector<int>;

  static constexpr std::size_t kMaxTerms = 1'000'000;

  explicit MonomialMap(int d) : d_(d) {}

  static MonomialMap constant(int d, double c);
  static MonomialMap variable(int d, int index);

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::map<Exponents, double>& terms() const noexcept { return terms_; }

  // Adds coefficient to a term; drops the term if the sum becomes zero.
  void add_term(const Exponents& kappa, double coefficient);

  double evaluate(std::span<const double> x) const;
  int degree() const;
  bool is_multilinear() const;

  MonomialMap operator+(const MonomialMap& other) const;
  MonomialMap operator-(const MonomialMap& other) const;
  MonomialMap operator*(const MonomialMap& other) const;
  MonomialMap scaled(double factor) const;
  MonomialMap pow(int exponent) const;

 private:
  int d_;
  std::map<Exponents, double> terms_;
};

ModelExpr parse_model(std::string_view text, int d);
double evaluate(const ModelExpr& model, std::span<const double> x);
MonomialMap expand_monomials(const ModelExpr& model);
bool is_multilinear(const MonomialMap& monomials);

}  // namespace unifx
