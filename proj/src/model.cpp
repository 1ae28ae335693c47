#include "unifx/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "unifx/error.hpp"

namespace unifx {

namespace {

ExprPtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprNode::Op::constant;
  n->value = v;
  return n;
}

ExprPtr make_variable(int index) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprNode::Op::variable;
  n->index = index;
  return n;
}

ExprPtr make_binary(ExprNode::Op op, ExprPtr lhs, ExprPtr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

ExprPtr make_neg(ExprPtr operand) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprNode::Op::neg;
  n->lhs = std::move(operand);
  return n;
}

ExprPtr make_pow(ExprPtr base, int exponent) {
  auto n = std::make_shared<ExprNode>();
  n->op = ExprNode::Op::pow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int d) : text_(text), d_(d) {}

  ExprPtr parse() {
    skip_ws();
    if (pos_ == text_.size()) fail("empty model expression");
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError("model syntax error at position " + std::to_string(at) + ": " + msg, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = make_binary(ExprNode::Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = make_binary(ExprNode::Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (accept('*')) lhs = make_binary(ExprNode::Op::mul, lhs, unary());
    return lhs;
  }

  ExprPtr unary() {
    if (accept('-')) return make_neg(unary());
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    while (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
        fail("power must be a non-negative integer");
      }
      std::size_t end = start;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      if (end == start) fail("power must be a non-negative integer");
      if (end < text_.size() && (text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E')) {
        fail_at("power must be a non-negative integer", start);
      }
      int exponent = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, exponent);
      if (ec != std::errc() || ptr != text_.data() + end) fail_at("power out of range", start);
      pos_ = end;
      base = make_pow(base, exponent);
    }
    return base;
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == 'x') {
      const std::size_t start = pos_;
      ++pos_;
      std::size_t end = pos_;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
      if (end == pos_) fail("expected a variable index after 'x'");
      int index = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, index);
      if (ec != std::errc() || ptr != text_.data() + end || index < 1 || index > d_) {
        fail_at("variable index " + std::string(text_.substr(pos_, end - pos_)) +
                    " out of range [1, " + std::to_string(d_) + "]",
                start);
      }
      pos_ = end;
      return make_variable(index);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    fail(std::string("unexpected '") + c + "'");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
        end = e;
        digits();
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, v);
    if (ec != std::errc() || ptr != text_.data() + end) fail_at("malformed number", start);
    pos_ = end;
    return make_constant(v);
  }

  std::string_view text_;
  int d_;
  std::size_t pos_ = 0;
};

double eval_node(const ExprNode& n, std::span<const double> x) {
  switch (n.op) {
    case ExprNode::Op::constant: return n.value;
    case ExprNode::Op::variable: return x[static_cast<std::size_t>(n.index - 1)];
    case ExprNode::Op::add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case ExprNode::Op::sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case ExprNode::Op::mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case ExprNode::Op::neg: return -eval_node(*n.lhs, x);
    case ExprNode::Op::pow: {
      const double base = eval_node(*n.lhs, x);
      double r = 1.0;
      for (int k = 0; k < n.exponent; ++k) r *= base;
      return r;
    }
  }
  return 0.0;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0) return "(" + s + ")";
  return s;
}

std::string render(const ExprNode& n) {
  switch (n.op) {
    case ExprNode::Op::constant: return format_number(n.value);
    case ExprNode::Op::variable: return "x" + std::to_string(n.index);
    case ExprNode::Op::add: return "(" + render(*n.lhs) + " + " + render(*n.rhs) + ")";
    case ExprNode::Op::sub: return "(" + render(*n.lhs) + " - " + render(*n.rhs) + ")";
    case ExprNode::Op::mul: return "(" + render(*n.lhs) + " * " + render(*n.rhs) + ")";
    case ExprNode::Op::neg: return "(-" + render(*n.lhs) + ")";
    case ExprNode::Op::pow: return "(" + render(*n.lhs) + ")^" + std::to_string(n.exponent);
  }
  return "";
}

ExprPtr fold(const ExprPtr& n) {
  using Op = ExprNode::Op;
  switch (n->op) {
    case Op::constant:
    case Op::variable: return n;
    case Op::neg: {
      ExprPtr a = fold(n->lhs);
      if (a->op == Op::constant) return make_constant(-a->value);
      return make_neg(a);
    }
    case Op::pow: {
      ExprPtr a = fold(n->lhs);
      if (a->op == Op::constant) {
        double r = 1.0;
        for (int k = 0; k < n->exponent; ++k) r *= a->value;
        return make_constant(r);
      }
      return make_pow(a, n->exponent);
    }
    case Op::add:
    case Op::sub:
    case Op::mul: {
      ExprPtr a = fold(n->lhs);
      ExprPtr b = fold(n->rhs);
      if (a->op == Op::constant && b->op == Op::constant) {
        const double va = a->value;
        const double vb = b->value;
        return make_constant(n->op == Op::add ? va + vb : n->op == Op::sub ? va - vb : va * vb);
      }
      return make_binary(n->op, a, b);
    }
  }
  return n;
}

MonomialMap expand_node(const ExprNode& n, int d) {
  using Op = ExprNode::Op;
  switch (n.op) {
    case Op::constant: return MonomialMap::constant(d, n.value);
    case Op::variable: return MonomialMap::variable(d, n.index);
    case Op::add: return expand_node(*n.lhs, d) + expand_node(*n.rhs, d);
    case Op::sub: return expand_node(*n.lhs, d) - expand_node(*n.rhs, d);
    case Op::mul: return expand_node(*n.lhs, d) * expand_node(*n.rhs, d);
    case Op::neg: return expand_node(*n.lhs, d).scaled(-1.0);
    case Op::pow: return expand_node(*n.lhs, d).pow(n.exponent);
  }
  return MonomialMap(d);
}

}  // namespace

ModelExpr ModelExpr::parse(std::string_view text, int d) {
  if (d < 1) throw InvalidArgument("model dimension must be at least 1");
  return ModelExpr(Parser(text, d).parse(), d);
}

ModelExpr::ModelExpr(ExprPtr root, int d) : root_(std::move(root)), d_(d) {
  if (!root_) throw InvalidArgument("model expression has no root");
}

double ModelExpr::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_) {
    throw InvalidArgument("model over d=" + std::to_string(d_) + " evaluated at a point of length " +
                          std::to_string(x.size()));
  }
  return eval_node(*root_, x);
}

std::string ModelExpr::to_string() const { return render(*root_); }

ModelExpr ModelExpr::fold_constants() const { return ModelExpr(fold(root_), d_); }

MonomialMap ModelExpr::expand() const { return expand_node(*root_, d_); }

MonomialMap MonomialMap::constant(int d, double c) {
  MonomialMap m(d);
  m.add_term(Exponents(static_cast<std::size_t>(d), 0), c);
  return m;
}

MonomialMap MonomialMap::variable(int d, int index) {
  MonomialMap m(d);
  Exponents kappa(static_cast<std::size_t>(d), 0);
  kappa[static_cast<std::size_t>(index - 1)] = 1;
  m.add_term(kappa, 1.0);
  return m;
}

void MonomialMap::add_term(const Exponents& kappa, double coefficient) {
  if (static_cast<int>(kappa.size()) != d_) {
    throw InvalidArgument("exponent vector length does not match the model dimension");
  }
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(kappa, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
  if (terms_.size() > kMaxTerms) {
    throw ResourceError("polynomial expansion exceeds " + std::to_string(kMaxTerms) + " terms");
  }
}

double MonomialMap::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != d_) {
    throw InvalidArgument("monomial map over d=" + std::to_string(d_) +
                          " evaluated at a point of length " + std::to_string(x.size()));
  }
  double total = 0.0;
  for (const auto& [kappa, c] : terms_) {
    double term = c;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
      for (int k = 0; k < kappa[i]; ++k) term *= x[i];
    }
    total += term;
  }
  return total;
}

int MonomialMap::degree() const {
  int best = 0;
  for (const auto& [kappa, c] : terms_) {
    int deg = 0;
    for (int k : kappa) deg += k;
    best = std::max(best, deg);
  }
  return best;
}

bool MonomialMap::is_multilinear() const {
  for (const auto& [kappa, c] : terms_) {
    for (int k : kappa) {
      if (k > 1) return false;
    }
  }
  return true;
}

MonomialMap MonomialMap::operator+(const MonomialMap& other) const {
  MonomialMap out = *this;
  for (const auto& [kappa, c] : other.terms_) out.add_term(kappa, c);
  return out;
}

MonomialMap MonomialMap::operator-(const MonomialMap& other) const {
  MonomialMap out = *this;
  for (const auto& [kappa, c] : other.terms_) out.add_term(kappa, -c);
  return out;
}

MonomialMap MonomialMap::operator*(const MonomialMap& other) const {
  struct Hash {
    std::size_t operator()(const Exponents& k) const noexcept {
      std::uint64_t h = 0xcbf29ce484222325ull;
      for (int e : k) h = (h ^ static_cast<std::uint64_t>(e)) * 0x100000001b3ull;
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<Exponents, double, Hash> acc;
  acc.reserve(std::min(terms_.size() * other.terms_.size(), kMaxTerms + 1));
  Exponents kappa(static_cast<std::size_t>(d_), 0);
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : other.terms_) {
      for (std::size_t i = 0; i < kappa.size(); ++i) kappa[i] = ka[i] + kb[i];
      acc[kappa] += ca * cb;
      if (acc.size() > kMaxTerms) {
        throw ResourceError("polynomial expansion exceeds " + std::to_string(kMaxTerms) + " terms");
      }
    }
  }
  MonomialMap out(d_);
  for (auto& [k, c] : acc) {
    if (c != 0.0) out.terms_.emplace(k, c);
  }
  return out;
}

MonomialMap MonomialMap::scaled(double factor) const {
  MonomialMap out(d_);
  for (const auto& [kappa, c] : terms_) out.add_term(kappa, c * factor);
  return out;
}

MonomialMap MonomialMap::pow(int exponent) const {
  MonomialMap result = constant(d_, 1.0);
  MonomialMap base = *this;
  // Square-and-multiply keeps intermediate expansions small.
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

ModelExpr parse_model(std::string_view text, int d) { return ModelExpr::parse(text, d); }

double evaluate(const ModelExpr& model, std::span<const double> x) { return model.evaluate(x); }

MonomialMap expand_monomials(const ModelExpr& model) { return model.expand(); }

bool is_multilinear(const MonomialMap& monomials) { return monomials.is_multilinear(); }

}  // namespace unifx
