#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kktcert {

// Differentiable scalar expressions over variables x1..xn.
//
// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := ["-"] atom ["^" integer]
//   atom   := number | "x" integer | func "(" expr ")" | "(" expr ")"
//   func   := "exp" | "log" | "sqrt"
// Whitespace is insignificant. Unary minus binds tighter than the binary
// operators but looser than "^", so -x1^2 parses as -(x1^2).
//
// Expressions are immutable after construction; evaluation and
// differentiation are pure and safe to share across threads.

enum class NodeKind {
  kConstant,
  kVariable,
  kNeg,
  kExp,
  kLog,
  kSqrt,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,  // integer constant exponent only
};

class Expr {
 public:
  Expr() = default;

  static Expr constant(double value);
  static Expr variable(int index);  // 1-based
  static Expr unary(NodeKind kind, Expr operand);
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs);
  static Expr pow(Expr base, long long exponent);

  bool empty() const { return node_ == nullptr; }
  NodeKind kind() const;
  double constant_value() const;
  int variable_index() const;
  long long exponent() const;
  const Expr& operand(std::size_t i) const;  // 0 = lhs/only, 1 = rhs
  std::size_t operand_count() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct GradientVector {
  std::vector<double> point;
  double value = 0.0;
  std::vector<double> grad;  // same length as point
};

// Syntax error with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// log/sqrt of a negative argument, division by zero, 0^negative.
class EvalDomainError : public std::runtime_error {
 public:
  EvalDomainError(const std::string& what, std::string node);
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

// Parses `text` against the grammar above; variable indices must lie in
// [1, dimension].
Expr parse_expr(std::string_view text, int dimension);

// IEEE double evaluation. Domain violations throw EvalDomainError naming
// the offending node; they are never propagated as NaN.
double evaluate(const Expr& e, std::span<const double> x);

// Forward-mode derivative (one dual-number pass per coordinate). The value
// field is computed by the same path as evaluate() and matches it exactly.
GradientVector gradient(const Expr& e, std::span<const double> x);

// Canonical fully parenthesized form; parse(print_expr(e)) reproduces the
// tree of e for any parser-produced e.
std::string print_expr(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

// Largest variable index referenced, 0 for constant expressions.
int max_variable_index(const Expr& e);

}  // namespace kktcert
