#include "kktcert/expr.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace kktcert {

struct Expr::Node {
  NodeKind kind;
  double value = 0.0;       // kConstant
  int var_index = 0;        // kVariable
  long long exponent = 0;   // kPow
  Expr lhs;
  Expr rhs;
};

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kConstant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 1) throw std::invalid_argument("variable index must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kVariable;
  n->var_index = index;
  return Expr(std::move(n));
}

Expr Expr::unary(NodeKind kind, Expr operand) {
  assert(kind == NodeKind::kNeg || kind == NodeKind::kExp ||
         kind == NodeKind::kLog || kind == NodeKind::kSqrt);
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return Expr(std::move(n));
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs) {
  assert(kind == NodeKind::kAdd || kind == NodeKind::kSub ||
         kind == NodeKind::kMul || kind == NodeKind::kDiv);
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expr(std::move(n));
}

Expr Expr::pow(Expr base, long long exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kPow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
int Expr::variable_index() const { return node_->var_index; }
long long Expr::exponent() const { return node_->exponent; }

const Expr& Expr::operand(std::size_t i) const {
  return i == 0 ? node_->lhs : node_->rhs;
}

std::size_t Expr::operand_count() const {
  switch (node_->kind) {
    case NodeKind::kConstant:
    case NodeKind::kVariable:
      return 0;
    case NodeKind::kNeg:
    case NodeKind::kExp:
    case NodeKind::kLog:
    case NodeKind::kSqrt:
    case NodeKind::kPow:
      return 1;
    default:
      return 2;
  }
}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
      offset_(offset) {}

EvalDomainError::EvalDomainError(const std::string& what, std::string node)
    : std::runtime_error(what + " in `" + node + "`"), node_(std::move(node)) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dimension)
      : text_(text), dimension_(dimension) {}

  Expr run() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_sum() {
    Expr lhs = parse_term();
    for (;;) {
      if (eat('+'))
        lhs = Expr::binary(NodeKind::kAdd, std::move(lhs), parse_term());
      else if (eat('-'))
        lhs = Expr::binary(NodeKind::kSub, std::move(lhs), parse_term());
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (eat('*'))
        lhs = Expr::binary(NodeKind::kMul, std::move(lhs), parse_factor());
      else if (eat('/'))
        lhs = Expr::binary(NodeKind::kDiv, std::move(lhs), parse_factor());
      else
        return lhs;
    }
  }

  // factor := ["-"] atom ["^" integer]; "^" binds tighter than the minus.
  Expr parse_factor() {
    bool negated = eat('-');
    Expr e = parse_atom();
    if (eat('^')) e = Expr::pow(std::move(e), parse_exponent());
    if (negated) e = Expr::unary(NodeKind::kNeg, std::move(e));
    return e;
  }

  long long parse_exponent() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == digits) throw ParseError("expected integer exponent", start);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                                text_[pos_] == 'E'))
      throw ParseError("non-integer exponent", start);
    long long value = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc())
      throw ParseError("exponent out of range", start);
    return value;
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (c == 'x' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))
      return parse_variable();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_call();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        ++pos_;
      std::size_t digits = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == digits) pos_ = mark;  // "2e" is the number 2 then junk
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    return Expr::constant(value);
  }

  Expr parse_variable() {
    std::size_t start = pos_++;  // consume 'x'
    std::size_t digits = pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    int index = 0;
    auto res = std::from_chars(text_.data() + digits, text_.data() + pos_, index);
    if (res.ec != std::errc())
      throw ParseError("variable index out of range", start);
    if (index < 1 || index > dimension_)
      throw ParseError("variable index out of range: x" + std::to_string(index) +
                           " with dimension " + std::to_string(dimension_),
                       start);
    return Expr::variable(index);
  }

  Expr parse_call() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    NodeKind kind;
    if (name == "exp")
      kind = NodeKind::kExp;
    else if (name == "log")
      kind = NodeKind::kLog;
    else if (name == "sqrt")
      kind = NodeKind::kSqrt;
    else
      throw ParseError("unknown function '" + std::string(name) + "'", start);
    if (!eat('(')) throw ParseError("expected '(' after function name", pos_);
    Expr arg = parse_sum();
    if (!eat(')')) throw ParseError("expected ')'", pos_);
    return Expr::unary(kind, std::move(arg));
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

// Dual number for forward-mode differentiation. The primal part follows the
// exact arithmetic evaluate() performs, so values agree bit-for-bit.
struct Dual {
  double v;
  double d;
};

[[noreturn]] void domain_error(const char* what, const Expr& e) {
  throw EvalDomainError(what, print_expr(e));
}

double ipow(double base, long long k, const Expr& node) {
  if (k < 0) {
    if (base == 0.0) domain_error("zero raised to a negative power", node);
    return 1.0 / ipow(base, -k, node);
  }
  double result = 1.0;
  double acc = base;
  for (long long e = k; e > 0; e >>= 1) {
    if (e & 1) result *= acc;
    if (e > 1) acc *= acc;
  }
  return result;
}

double eval_node(const Expr& e, std::span<const double> x) {
  switch (e.kind()) {
    case NodeKind::kConstant:
      return e.constant_value();
    case NodeKind::kVariable: {
      int i = e.variable_index();
      if (i < 1 || static_cast<std::size_t>(i) > x.size())
        throw std::invalid_argument("point has wrong dimension for x" +
                                    std::to_string(i));
      return x[static_cast<std::size_t>(i) - 1];
    }
    case NodeKind::kNeg:
      return -eval_node(e.operand(0), x);
    case NodeKind::kExp:
      return std::exp(eval_node(e.operand(0), x));
    case NodeKind::kLog: {
      double a = eval_node(e.operand(0), x);
      if (a <= 0.0) domain_error("log of non-positive argument", e);
      return std::log(a);
    }
    case NodeKind::kSqrt: {
      double a = eval_node(e.operand(0), x);
      if (a < 0.0) domain_error("sqrt of negative argument", e);
      return std::sqrt(a);
    }
    case NodeKind::kAdd:
      return eval_node(e.operand(0), x) + eval_node(e.operand(1), x);
    case NodeKind::kSub:
      return eval_node(e.operand(0), x) - eval_node(e.operand(1), x);
    case NodeKind::kMul:
      return eval_node(e.operand(0), x) * eval_node(e.operand(1), x);
    case NodeKind::kDiv: {
      double a = eval_node(e.operand(0), x);
      double b = eval_node(e.operand(1), x);
      if (b == 0.0) domain_error("division by zero", e);
      return a / b;
    }
    case NodeKind::kPow:
      return ipow(eval_node(e.operand(0), x), e.exponent(), e);
  }
  throw std::logic_error("unreachable node kind");
}

Dual eval_dual(const Expr& e, std::span<const double> x, std::size_t coord) {
  switch (e.kind()) {
    case NodeKind::kConstant:
      return {e.constant_value(), 0.0};
    case NodeKind::kVariable: {
      int i = e.variable_index();
      if (i < 1 || static_cast<std::size_t>(i) > x.size())
        throw std::invalid_argument("point has wrong dimension for x" +
                                    std::to_string(i));
      std::size_t idx = static_cast<std::size_t>(i) - 1;
      return {x[idx], idx == coord ? 1.0 : 0.0};
    }
    case NodeKind::kNeg: {
      Dual a = eval_dual(e.operand(0), x, coord);
      return {-a.v, -a.d};
    }
    case NodeKind::kExp: {
      Dual a = eval_dual(e.operand(0), x, coord);
      double v = std::exp(a.v);
      return {v, a.d * v};
    }
    case NodeKind::kLog: {
      Dual a = eval_dual(e.operand(0), x, coord);
      if (a.v <= 0.0) domain_error("log of non-positive argument", e);
      return {std::log(a.v), a.d / a.v};
    }
    case NodeKind::kSqrt: {
      Dual a = eval_dual(e.operand(0), x, coord);
      if (a.v < 0.0) domain_error("sqrt of negative argument", e);
      double v = std::sqrt(a.v);
      if (a.d == 0.0) return {v, 0.0};
      if (v == 0.0) domain_error("derivative of sqrt at zero", e);
      return {v, a.d / (2.0 * v)};
    }
    case NodeKind::kAdd: {
      Dual a = eval_dual(e.operand(0), x, coord);
      Dual b = eval_dual(e.operand(1), x, coord);
      return {a.v + b.v, a.d + b.d};
    }
    case NodeKind::kSub: {
      Dual a = eval_dual(e.operand(0), x, coord);
      Dual b = eval_dual(e.operand(1), x, coord);
      return {a.v - b.v, a.d - b.d};
    }
    case NodeKind::kMul: {
      Dual a = eval_dual(e.operand(0), x, coord);
      Dual b = eval_dual(e.operand(1), x, coord);
      return {a.v * b.v, a.d * b.v + a.v * b.d};
    }
    case NodeKind::kDiv: {
      Dual a = eval_dual(e.operand(0), x, coord);
      Dual b = eval_dual(e.operand(1), x, coord);
      if (b.v == 0.0) domain_error("division by zero", e);
      return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
    }
    case NodeKind::kPow: {
      Dual a = eval_dual(e.operand(0), x, coord);
      long long k = e.exponent();
      double v = ipow(a.v, k, e);
      if (k == 0 || a.d == 0.0) return {v, 0.0};
      if (a.v == 0.0 && k < 1) domain_error("zero raised to a negative power", e);
      // d/dx a^k = k a^(k-1) a'; compute a^(k-1) by the same ipow path.
      double deriv = static_cast<double>(k) * ipow(a.v, k - 1, e) * a.d;
      return {v, deriv};
    }
  }
  throw std::logic_error("unreachable node kind");
}

void format_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void print_node(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::kConstant:
      format_double(out, e.constant_value());
      return;
    case NodeKind::kVariable:
      out += 'x';
      out += std::to_string(e.variable_index());
      return;
    case NodeKind::kNeg:
      out += "-(";
      print_node(e.operand(0), out);
      out += ')';
      return;
    case NodeKind::kExp:
    case NodeKind::kLog:
    case NodeKind::kSqrt:
      out += e.kind() == NodeKind::kExp ? "exp("
             : e.kind() == NodeKind::kLog ? "log("
                                          : "sqrt(";
      print_node(e.operand(0), out);
      out += ')';
      return;
    case NodeKind::kPow:
      out += '(';
      print_node(e.operand(0), out);
      out += ")^";
      out += std::to_string(e.exponent());
      return;
    default: {
      const char* op = e.kind() == NodeKind::kAdd   ? " + "
                       : e.kind() == NodeKind::kSub ? " - "
                       : e.kind() == NodeKind::kMul ? " * "
                                                    : " / ";
      out += '(';
      print_node(e.operand(0), out);
      out += op;
      print_node(e.operand(1), out);
      out += ')';
      return;
    }
  }
}

}  // namespace

Expr parse_expr(std::string_view text, int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  return Parser(text, dimension).run();
}

double evaluate(const Expr& e, std::span<const double> x) {
  if (e.empty()) throw std::invalid_argument("empty expression");
  return eval_node(e, x);
}

GradientVector gradient(const Expr& e, std::span<const double> x) {
  if (e.empty()) throw std::invalid_argument("empty expression");
  GradientVector result;
  result.point.assign(x.begin(), x.end());
  result.grad.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Dual d = eval_dual(e, x, i);
    result.grad[i] = d.d;
    if (i == 0) result.value = d.v;
  }
  if (x.empty()) result.value = eval_node(e, x);
  return result;
}

std::string print_expr(const Expr& e) {
  if (e.empty()) return "";
  std::string out;
  print_node(e, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::kConstant:
      return a.constant_value() == b.constant_value();
    case NodeKind::kVariable:
      return a.variable_index() == b.variable_index();
    case NodeKind::kPow:
      if (a.exponent() != b.exponent()) return false;
      return structurally_equal(a.operand(0), b.operand(0));
    default:
      for (std::size_t i = 0; i < a.operand_count(); ++i)
        if (!structurally_equal(a.operand(i), b.operand(i))) return false;
      return true;
  }
}

int max_variable_index(const Expr& e) {
  if (e.empty()) return 0;
  if (e.kind() == NodeKind::kVariable) return e.variable_index();
  int m = 0;
  for (std::size_t i = 0; i < e.operand_count(); ++i)
    m = std::max(m, max_variable_index(e.operand(i)));
  return m;
}

}  // namespace kktcert
