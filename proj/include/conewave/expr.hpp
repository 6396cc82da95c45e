#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace conewave {

/// Variables an expression may reference.
enum class Var : unsigned { T = 1u << 0, X = 1u << 1, U = 1u << 2 };

/// Bitmask of allowed/bound variables.
using VarMask = unsigned;

constexpr VarMask kVarT = static_cast<unsigned>(Var::T);
constexpr VarMask kVarX = static_cast<unsigned>(Var::X);
constexpr VarMask kVarU = static_cast<unsigned>(Var::U);
constexpr VarMask kVarsTX = kVarT | kVarX;
constexpr VarMask kVarsTXU = kVarT | kVarX | kVarU;

/// Syntax error with the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when evaluation would produce a non-finite or undefined value
/// (division by zero, log of a non-positive number, negative base with a
/// fractional exponent, unbound variable, ...).  Non-finite values never
/// escape eval().
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
struct Node;
}

/// Immutable arithmetic expression over the variables t, x, u.
///
/// Trees are built by parse() and never mutated afterwards, so they can be
/// shared freely across threads.
class Expr {
 public:
  Expr() = default;

  bool empty() const { return root_ == nullptr; }
  const detail::Node& root() const;

  friend Expr parse(const std::string& source);
  friend Expr make_constant(double value);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> root);
  std::shared_ptr<const detail::Node> root_;
};

/// Evaluation environment. Only the variables present in `bound` may be read.
struct Env {
  double t = 0.0;
  double x = 0.0;
  double u = 0.0;
  VarMask bound = 0;

  static Env tx(double t, double x) { return {t, x, 0.0, kVarsTX}; }
  static Env txu(double t, double x, double u) { return {t, x, u, kVarsTXU}; }
  static Env only_x(double x) { return {0.0, x, 0.0, kVarX}; }
};

/// Grammar (documented in docs/expr-grammar.ebnf):
///   expr    = term { ("+"|"-") term } ;
///   term    = unary { ("*"|"/") unary } ;
///   unary   = "-" unary | power ;
///   power   = primary [ "^" unary ] ;           (right associative)
///   primary = number | var | func "(" expr { "," expr } ")" | "(" expr ")" ;
Expr parse(const std::string& source);

Expr make_constant(double value);

double eval(const Expr& e, const Env& env);

/// True iff every variable node of e is contained in `allowed`.
bool check_vars(const Expr& e, VarMask allowed);

/// Bitmask of the variables actually used by e.
VarMask used_vars(const Expr& e);

/// Normalized text form; unparse(parse(s)) re-parses to an identical tree.
std::string unparse(const Expr& e);

bool identical(const Expr& a, const Expr& b);

}  // namespace conewave
