#pragma once

#include "mm3/coefficient.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mm3::expr {

enum class Kind { Constant, Variable, Sum, Product, Power, Exp, Sin, Cos };

class Expr;

struct Node {
  Kind kind = Kind::Constant;
  Coefficient value;
  std::string name;
  std::vector<Expr> args;
  int exponent = 0;
};

/// Immutable, shared expression tree over named real variables with complex coefficients.
class Expr {
 public:
  Expr() : Expr(Coefficient(0)) {}
  Expr(Coefficient c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = std::move(c);
    node_ = std::move(n);
  }
  Expr(int v) : Expr(Coefficient(v)) {}
  Expr(const Rational& v) : Expr(Coefficient(v)) {}
  Expr(const GaussianRational& v) : Expr(Coefficient(v)) {}

  static Expr variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->name = std::move(name);
    return Expr(std::move(n));
  }
  static Expr from_node(Node n) { return Expr(std::make_shared<Node>(std::move(n))); }

  Kind kind() const { return node_->kind; }
  const Node& node() const { return *node_; }
  const std::vector<Expr>& args() const { return node_->args; }

  bool is_constant() const { return kind() == Kind::Constant; }
  bool is_zero() const { return is_constant() && node_->value.is_zero(); }
  bool is_one() const { return is_constant() && node_->value.is_one(); }
  const Coefficient& constant() const { return node_->value; }
  const std::string& name() const { return node_->name; }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Builders. They flatten, fold constants and drop neutral elements, nothing more.

inline Expr var(std::string name) { return Expr::variable(std::move(name)); }

inline Expr sum(const std::vector<Expr>& terms) {
  std::vector<Expr> flat;
  Coefficient c(0);
  for (const auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& u : t.args()) {
        if (u.is_constant())
          c += u.constant();
        else
          flat.push_back(u);
      }
    } else if (t.is_constant()) {
      c += t.constant();
    } else {
      flat.push_back(t);
    }
  }
  if (!c.is_zero()) flat.emplace_back(c);
  if (flat.empty()) return Expr(c);
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = Kind::Sum;
  n.args = std::move(flat);
  return Expr::from_node(std::move(n));
}

inline Expr product(const std::vector<Expr>& factors) {
  std::vector<Expr> flat;
  Coefficient c(1);
  auto absorb = [&](const Expr& f) {
    if (f.is_constant())
      c *= f.constant();
    else
      flat.push_back(f);
  };
  for (const auto& f : factors) {
    if (f.kind() == Kind::Product) {
      for (const auto& u : f.args()) absorb(u);
    } else {
      absorb(f);
    }
  }
  if (c.is_zero()) return Expr(c);
  if (flat.empty()) return Expr(c);
  if (c.is_one() && flat.size() == 1) return flat.front();
  std::vector<Expr> args;
  if (!c.is_one()) args.emplace_back(c);
  args.insert(args.end(), flat.begin(), flat.end());
  Node n;
  n.kind = Kind::Product;
  n.args = std::move(args);
  return Expr::from_node(std::move(n));
}

inline Expr power(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  if (base.is_constant()) return Expr(base.constant().pow(exponent));
  if (base.kind() == Kind::Power) return power(base.args()[0], base.node().exponent * exponent);
  Node n;
  n.kind = Kind::Power;
  n.args = {base};
  n.exponent = exponent;
  return Expr::from_node(std::move(n));
}

namespace detail {
inline Expr unary(Kind k, const Expr& arg) {
  Node n;
  n.kind = k;
  n.args = {arg};
  return Expr::from_node(std::move(n));
}
}  // namespace detail

inline Expr exp(const Expr& a) { return a.is_zero() ? Expr(1) : detail::unary(Kind::Exp, a); }
inline Expr sin(const Expr& a) { return a.is_zero() ? Expr(0) : detail::unary(Kind::Sin, a); }
inline Expr cos(const Expr& a) { return a.is_zero() ? Expr(1) : detail::unary(Kind::Cos, a); }

inline Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
inline Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
inline Expr operator-(const Expr& a) { return product({Expr(-1), a}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  return product({a, power(b, -1)});
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline bool constant_needs_parens(const Coefficient& c) {
  std::string s = c.str();
  return s[0] == '-' || s.find('/') != std::string::npos;
}

inline std::string print_impl(const Expr& e, int parent_prec);

inline std::string print_factor(const Expr& e) {
  if (e.is_constant()) {
    std::string s = e.constant().str();
    return constant_needs_parens(e.constant()) ? "(" + s + ")" : s;
  }
  return print_impl(e, 2);
}

inline std::string print_product(const Expr& e) {
  const auto& args = e.args();
  std::string out;
  std::size_t start = 0;
  if (args[0].is_constant()) {
    const auto& c = args[0].constant();
    if (c == Coefficient(-1)) {
      out = "-";
    } else {
      std::string s = c.str();
      out = (s.find('/') != std::string::npos && s[0] != '(') ? "(" + s + ")*" : s + "*";
    }
    start = 1;
  }
  for (std::size_t k = start; k < args.size(); ++k) {
    if (k > start) out += "*";
    out += print_factor(args[k]);
  }
  return out;
}

inline std::string print_impl(const Expr& e, int parent_prec) {
  switch (e.kind()) {
    case Kind::Constant: {
      std::string s = e.constant().str();
      if (parent_prec >= 2 && constant_needs_parens(e.constant())) return "(" + s + ")";
      return s;
    }
    case Kind::Variable:
      return e.name();
    case Kind::Sum: {
      std::string out;
      bool first = true;
      for (const auto& t : e.args()) {
        std::string s = print_impl(t, 1);
        if (first) {
          out = s;
        } else if (s[0] == '-') {
          out += " - " + s.substr(1);
        } else {
          out += " + " + s;
        }
        first = false;
      }
      return parent_prec > 1 ? "(" + out + ")" : out;
    }
    case Kind::Product: {
      std::string out = print_product(e);
      // A leading minus binds like unary minus, which is fine inside a sum but
      // not as the base of a power.
      if (parent_prec >= 3 || (parent_prec == 2 && out[0] == '-')) return "(" + out + ")";
      return out;
    }
    case Kind::Power: {
      const Expr& b = e.args()[0];
      std::string base = (b.kind() == Kind::Variable || b.kind() == Kind::Exp || b.kind() == Kind::Sin ||
                          b.kind() == Kind::Cos)
                             ? print_impl(b, 0)
                             : "(" + print_impl(b, 0) + ")";
      std::string out = base + "^" + std::to_string(e.node().exponent);
      return parent_prec >= 3 ? "(" + out + ")" : out;
    }
    case Kind::Exp:
      return "exp(" + print_impl(e.args()[0], 0) + ")";
    case Kind::Sin:
      return "sin(" + print_impl(e.args()[0], 0) + ")";
    case Kind::Cos:
      return "cos(" + print_impl(e.args()[0], 0) + ")";
  }
  return {};
}

}  // namespace detail

inline std::string print(const Expr& e) { return detail::print_impl(e, 0); }

// ---------------------------------------------------------------------------
// Parsing
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          exponent must fold to an integer
//   primary := number | 'i' | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//   func    := 'exp' | 'sin' | 'cos'

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
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

  Expr parse_expr() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(parse_term());
      else if (accept('-'))
        terms.push_back(-parse_term());
      else
        break;
    }
    return sum(terms);
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        Expr rhs = parse_unary();
        if (rhs.is_zero()) throw ParseError("division by zero", at);
        lhs = lhs / rhs;
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    skip_ws();
    std::size_t at = pos_;
    if (accept('^')) {
      Expr ex = parse_unary();
      if (!ex.is_constant() || !ex.constant().is_exact_integer())
        throw ParseError("exponent must be an integer constant", at);
      const auto& r = ex.constant().exact().re;
      if (abs(r) > 1000) throw ParseError("exponent out of range", at);
      int n = static_cast<int>(numerator(r));
      if (base.is_zero() && n < 0) throw ParseError("division by zero", at);
      return power(base, n);
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string ident(text_.substr(start, pos_ - start));
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        if (ident != "exp" && ident != "sin" && ident != "cos")
          throw ParseError("unknown function '" + ident + "'", start);
        ++pos_;
        Expr arg = parse_expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        if (ident == "exp") return exp(arg);
        if (ident == "sin") return sin(arg);
        return cos(arg);
      }
      if (ident == "i") return Expr(Coefficient::i());
      if (ident == "pi") return Expr(Coefficient::real(std::numbers::pi));
      if (ident == "exp" || ident == "sin" || ident == "cos")
        throw ParseError("function '" + ident + "' needs an argument", start);
      return var(ident);
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    try {
      return Expr(parse_rational(text_.substr(start, pos_ - start)));
    } catch (const std::exception& ex) {
      throw ParseError(ex.what(), start);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Structure queries and transformations

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == Kind::Variable) out.insert(e.name());
  for (const auto& a : e.args()) collect_variables(a, out);
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

inline bool depends_on(const Expr& e, const std::string& v) {
  if (e.kind() == Kind::Variable) return e.name() == v;
  for (const auto& a : e.args())
    if (depends_on(a, v)) return true;
  return false;
}

/// Exact partial derivative; variables other than `v` are constants.
inline Expr differentiate(const Expr& e, const std::string& v) {
  if (!depends_on(e, v)) return Expr(0);
  switch (e.kind()) {
    case Kind::Constant:
      return Expr(0);
    case Kind::Variable:
      return Expr(1);
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.args()) terms.push_back(differentiate(t, v));
      return sum(terms);
    }
    case Kind::Product: {
      const auto& f = e.args();
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < f.size(); ++k) {
        Expr dk = differentiate(f[k], v);
        if (dk.is_zero()) continue;
        std::vector<Expr> factors(f.begin(), f.end());
        factors[k] = dk;
        terms.push_back(product(factors));
      }
      return sum(terms);
    }
    case Kind::Power: {
      const Expr& b = e.args()[0];
      int n = e.node().exponent;
      return product({Expr(n), power(b, n - 1), differentiate(b, v)});
    }
    case Kind::Exp:
      return product({e, differentiate(e.args()[0], v)});
    case Kind::Sin:
      return product({cos(e.args()[0]), differentiate(e.args()[0], v)});
    case Kind::Cos:
      return product({Expr(-1), sin(e.args()[0]), differentiate(e.args()[0], v)});
  }
  return Expr(0);
}

inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  switch (e.kind()) {
    case Kind::Constant:
      return e;
    case Kind::Variable: {
      auto it = replacements.find(e.name());
      return it == replacements.end() ? e : it->second;
    }
    case Kind::Sum:
    case Kind::Product: {
      std::vector<Expr> args;
      for (const auto& a : e.args()) args.push_back(substitute(a, replacements));
      return e.kind() == Kind::Sum ? sum(args) : product(args);
    }
    case Kind::Power:
      return power(substitute(e.args()[0], replacements), e.node().exponent);
    case Kind::Exp:
      return exp(substitute(e.args()[0], replacements));
    case Kind::Sin:
      return sin(substitute(e.args()[0], replacements));
    case Kind::Cos:
      return cos(substitute(e.args()[0], replacements));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation

class UnboundVariable : public std::out_of_range {
 public:
  explicit UnboundVariable(const std::string& name)
      : std::out_of_range("unbound variable '" + name + "'"), name_(name) {}
  const std::string& variable() const { return name_; }

 private:
  std::string name_;
};

using Bindings = std::map<std::string, double>;

namespace detail {
inline cplx ipow(cplx base, int n) {
  if (n < 0) return cplx(1.0) / ipow(base, -n);
  cplx result(1.0);
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}
}  // namespace detail

inline cplx evaluate(const Expr& e, const Bindings& bindings) {
  switch (e.kind()) {
    case Kind::Constant:
      return e.constant().to_complex();
    case Kind::Variable: {
      auto it = bindings.find(e.name());
      if (it == bindings.end()) throw UnboundVariable(e.name());
      return it->second;
    }
    case Kind::Sum: {
      cplx acc(0.0);
      for (const auto& a : e.args()) acc += evaluate(a, bindings);
      return acc;
    }
    case Kind::Product: {
      cplx acc(1.0);
      for (const auto& a : e.args()) acc *= evaluate(a, bindings);
      return acc;
    }
    case Kind::Power:
      return detail::ipow(evaluate(e.args()[0], bindings), e.node().exponent);
    case Kind::Exp:
      return std::exp(evaluate(e.args()[0], bindings));
    case Kind::Sin:
      return std::sin(evaluate(e.args()[0], bindings));
    case Kind::Cos:
      return std::cos(evaluate(e.args()[0], bindings));
  }
  return {};
}

/// Postfix program for fast repeated evaluation with a fixed variable order.
class Compiled {
 public:
  Compiled() = default;
  Compiled(const Expr& e, std::vector<std::string> order) : order_(std::move(order)) {
    emit(e);
    stack_.resize(depth_max_ + 1);
  }

  const std::vector<std::string>& order() const { return order_; }

  cplx operator()(std::span<const double> values) const {
    thread_local std::vector<cplx> stack;
    stack.clear();
    stack.reserve(stack_.size());
    for (const auto& op : code_) {
      switch (op.code) {
        case Op::Const:
          stack.push_back(op.value);
          break;
        case Op::Var:
          stack.push_back(values[op.index]);
          break;
        case Op::Add: {
          cplx acc(0.0);
          for (int k = 0; k < op.index; ++k) {
            acc += stack.back();
            stack.pop_back();
          }
          stack.push_back(acc);
          break;
        }
        case Op::Mul: {
          cplx acc(1.0);
          for (int k = 0; k < op.index; ++k) {
            acc *= stack.back();
            stack.pop_back();
          }
          stack.push_back(acc);
          break;
        }
        case Op::Pow:
          stack.back() = detail::ipow(stack.back(), op.index);
          break;
        case Op::Exp:
          stack.back() = std::exp(stack.back());
          break;
        case Op::Sin:
          stack.back() = std::sin(stack.back());
          break;
        case Op::Cos:
          stack.back() = std::cos(stack.back());
          break;
      }
    }
    return stack.back();
  }

 private:
  enum class Op { Const, Var, Add, Mul, Pow, Exp, Sin, Cos };
  struct Instr {
    Op code;
    int index = 0;
    cplx value{};
  };

  void emit(const Expr& e) {
    switch (e.kind()) {
      case Kind::Constant:
        push({Op::Const, 0, e.constant().to_complex()}, +1);
        break;
      case Kind::Variable: {
        auto it = std::find(order_.begin(), order_.end(), e.name());
        if (it == order_.end()) throw UnboundVariable(e.name());
        push({Op::Var, static_cast<int>(it - order_.begin()), {}}, +1);
        break;
      }
      case Kind::Sum:
      case Kind::Product:
        for (const auto& a : e.args()) emit(a);
        push({e.kind() == Kind::Sum ? Op::Add : Op::Mul, static_cast<int>(e.args().size()), {}},
             1 - static_cast<int>(e.args().size()));
        break;
      case Kind::Power:
        emit(e.args()[0]);
        push({Op::Pow, e.node().exponent, {}}, 0);
        break;
      case Kind::Exp:
      case Kind::Sin:
      case Kind::Cos:
        emit(e.args()[0]);
        push({e.kind() == Kind::Exp ? Op::Exp : (e.kind() == Kind::Sin ? Op::Sin : Op::Cos), 0, {}}, 0);
        break;
    }
  }
  void push(Instr i, int delta) {
    code_.push_back(i);
    depth_ += delta;
    depth_max_ = std::max(depth_max_, depth_);
  }

  std::vector<std::string> order_;
  std::vector<Instr> code_;
  std::vector<cplx> stack_;
  int depth_ = 0;
  int depth_max_ = 0;
};

inline Compiled compile(const Expr& e, std::vector<std::string> order) { return Compiled(e, std::move(order)); }

}  // namespace mm3::expr
