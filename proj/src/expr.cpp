#include "conewave/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

namespace conewave {
namespace detail {

enum class NodeKind { Number, Variable, Negate, Binary, Call };

enum class BinOp { Add, Sub, Mul, Div, Pow };

enum class Func { Abs, Sqrt, Sin, Cos, Exp, Log, Atan, Min, Max, Pow };

struct Node {
  NodeKind kind;
  double number = 0.0;
  Var var = Var::T;
  BinOp op = BinOp::Add;
  Func func = Func::Abs;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

using NodePtr = std::shared_ptr<const Node>;

namespace {

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = v;
  return n;
}

NodePtr variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->var = v;
  return n;
}

NodePtr negate(NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negate;
  n->a = std::move(a);
  return n;
}

NodePtr binary(BinOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr call(Func f, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->func = f;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct FuncInfo {
  const char* name;
  Func func;
  int arity;
};

constexpr FuncInfo kFuncs[] = {
    {"abs", Func::Abs, 1}, {"sqrt", Func::Sqrt, 1}, {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1}, {"exp", Func::Exp, 1},   {"log", Func::Log, 1},
    {"atan", Func::Atan, 1}, {"min", Func::Min, 2}, {"max", Func::Max, 2},
    {"pow", Func::Pow, 2},
};

const char* func_name(Func f) {
  for (const auto& info : kFuncs)
    if (info.func == f) return info.name;
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  double number = 0.0;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    cur_.offset = pos_;
    cur_.text.clear();
    if (pos_ >= src_.size()) {
      cur_.kind = Tok::End;
      return;
    }
    char c = src_[pos_];
    switch (c) {
      case '+': cur_.kind = Tok::Plus; ++pos_; return;
      case '-': cur_.kind = Tok::Minus; ++pos_; return;
      case '*': cur_.kind = Tok::Star; ++pos_; return;
      case '/': cur_.kind = Tok::Slash; ++pos_; return;
      case '^': cur_.kind = Tok::Caret; ++pos_; return;
      case '(': cur_.kind = Tok::LParen; ++pos_; return;
      case ')': cur_.kind = Tok::RParen; ++pos_; return;
      case ',': cur_.kind = Tok::Comma; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      cur_.kind = Tok::Ident;
      cur_.text = src_.substr(start, pos_ - start);
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  void lex_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // "2e" is the number 2 followed by identifier e; reject later
      }
    }
    cur_.kind = Tok::Number;
    cur_.text = src_.substr(start, pos_ - start);
    cur_.number = std::strtod(cur_.text.c_str(), nullptr);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token cur_;
};

// ---------------------------------------------------------------------------
// Recursive descent parser

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError("expected end of input, operator, or ')'", t.offset);
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      Tok k = lex_.peek().kind;
      if (k == Tok::Plus || k == Tok::Minus) {
        lex_.take();
        NodePtr rhs = parse_term();
        lhs = binary(k == Tok::Plus ? BinOp::Add : BinOp::Sub, std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      Tok k = lex_.peek().kind;
      if (k == Tok::Star || k == Tok::Slash) {
        lex_.take();
        NodePtr rhs = parse_unary();
        lhs = binary(k == Tok::Star ? BinOp::Mul : BinOp::Div, std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return negate(parse_unary());
    }
    return parse_power();
  }

  // '^' binds tighter than unary minus and is right associative; the
  // exponent may itself be signed, so parse_unary on the right.
  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (lex_.peek().kind == Tok::Caret) {
      lex_.take();
      NodePtr exponent = parse_unary();
      return binary(BinOp::Pow, std::move(base), std::move(exponent));
    }
    return base;
  }

  NodePtr parse_primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::Number:
        return number(t.number);
      case Tok::LParen: {
        NodePtr e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        return parse_ident(t);
      default:
        throw ParseError("expected number, variable, function, or '('", t.offset);
    }
  }

  NodePtr parse_ident(const Token& t) {
    if (t.text == "t") return variable(Var::T);
    if (t.text == "x") return variable(Var::X);
    if (t.text == "u") return variable(Var::U);
    for (const auto& info : kFuncs) {
      if (t.text != info.name) continue;
      expect(Tok::LParen, "'(' after function name");
      NodePtr a = parse_expr();
      NodePtr b;
      if (info.arity == 2) {
        expect(Tok::Comma, "','");
        b = parse_expr();
      }
      expect(Tok::RParen, "')'");
      return call(info.func, std::move(a), std::move(b));
    }
    throw ParseError("unknown identifier '" + t.text + "'", t.offset);
  }

  void expect(Tok kind, const char* what) {
    Token t = lex_.take();
    if (t.kind != kind) throw ParseError(std::string("expected ") + what, t.offset);
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void eval_fail(const std::string& what) { throw EvalError(what); }

double check_finite(double v, const char* what) {
  if (!std::isfinite(v)) eval_fail(std::string(what) + " produced a non-finite value");
  return v;
}

double eval_pow(double a, double b) {
  if (a < 0.0) {
    double ip;
    if (std::modf(b, &ip) != 0.0)
      eval_fail("negative base with non-integer exponent; write abs(...)^p");
  }
  if (a == 0.0 && b < 0.0) eval_fail("zero raised to a negative power");
  return check_finite(std::pow(a, b), "pow");
}

double eval_node(const Node& n, const Env& env) {
  switch (n.kind) {
    case NodeKind::Number:
      return n.number;
    case NodeKind::Variable: {
      VarMask bit = static_cast<VarMask>(n.var);
      if (!(env.bound & bit)) {
        const char* name = n.var == Var::T ? "t" : n.var == Var::X ? "x" : "u";
        eval_fail(std::string("unbound variable '") + name + "'");
      }
      switch (n.var) {
        case Var::T: return env.t;
        case Var::X: return env.x;
        case Var::U: return env.u;
      }
      eval_fail("corrupt variable node");
    }
    case NodeKind::Negate:
      return -eval_node(*n.a, env);
    case NodeKind::Binary: {
      double a = eval_node(*n.a, env);
      double b = eval_node(*n.b, env);
      switch (n.op) {
        case BinOp::Add: return check_finite(a + b, "+");
        case BinOp::Sub: return check_finite(a - b, "-");
        case BinOp::Mul: return check_finite(a * b, "*");
        case BinOp::Div:
          if (b == 0.0) eval_fail("division by zero");
          return check_finite(a / b, "/");
        case BinOp::Pow: return eval_pow(a, b);
      }
      eval_fail("corrupt binary node");
    }
    case NodeKind::Call: {
      double a = eval_node(*n.a, env);
      switch (n.func) {
        case Func::Abs: return std::fabs(a);
        case Func::Sqrt:
          if (a < 0.0) eval_fail("sqrt of a negative number");
          return std::sqrt(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return check_finite(std::exp(a), "exp");
        case Func::Log:
          if (a <= 0.0) eval_fail("log of a non-positive number");
          return std::log(a);
        case Func::Atan: return std::atan(a);
        case Func::Min: return std::fmin(a, eval_node(*n.b, env));
        case Func::Max: return std::fmax(a, eval_node(*n.b, env));
        case Func::Pow: return eval_pow(a, eval_node(*n.b, env));
      }
      eval_fail("corrupt call node");
    }
  }
  eval_fail("corrupt expression node");
}

VarMask vars_of(const Node& n) {
  switch (n.kind) {
    case NodeKind::Number: return 0;
    case NodeKind::Variable: return static_cast<VarMask>(n.var);
    case NodeKind::Negate: return vars_of(*n.a);
    case NodeKind::Binary: return vars_of(*n.a) | vars_of(*n.b);
    case NodeKind::Call: {
      VarMask m = vars_of(*n.a);
      if (n.b) m |= vars_of(*n.b);
      return m;
    }
  }
  return 0;
}

bool nodes_identical(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number:
      // bit-level identity, so -0 and 0 count as different trees
      return a.number == b.number && std::signbit(a.number) == std::signbit(b.number);
    case NodeKind::Variable:
      return a.var == b.var;
    case NodeKind::Negate:
      return nodes_identical(*a.a, *b.a);
    case NodeKind::Binary:
      return a.op == b.op && nodes_identical(*a.a, *b.a) && nodes_identical(*a.b, *b.b);
    case NodeKind::Call:
      if (a.func != b.func) return false;
      if (!nodes_identical(*a.a, *b.a)) return false;
      if ((a.b == nullptr) != (b.b == nullptr)) return false;
      return a.b == nullptr || nodes_identical(*a.b, *b.b);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Unparse with minimal parentheses.
//
// Precedence levels: add=1, mul=2, unary=3, pow=4, atom=5.

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void unparse_node(const Node& n, int parent_prec, bool right_of_binary, std::string& out);

void unparse_child(const Node& n, int prec, bool right, std::string& out) {
  unparse_node(n, prec, right, out);
}

int node_prec(const Node& n) {
  switch (n.kind) {
    case NodeKind::Binary:
      switch (n.op) {
        case BinOp::Add:
        case BinOp::Sub: return 1;
        case BinOp::Mul:
        case BinOp::Div: return 2;
        case BinOp::Pow: return 4;
      }
      return 1;
    case NodeKind::Negate: return 3;
    default: return 5;
  }
}

void unparse_node(const Node& n, int parent_prec, bool right_of_binary, std::string& out) {
  int prec = node_prec(n);
  bool need_paren = prec < parent_prec || (prec == parent_prec && right_of_binary && prec != 4);
  // pow is right associative: a^(b^c) needs no parens on the right, but
  // (a^b)^c needs them on the left.
  if (n.kind == NodeKind::Binary && n.op == BinOp::Pow && parent_prec == 4 && !right_of_binary)
    need_paren = true;
  if (need_paren) out += '(';
  switch (n.kind) {
    case NodeKind::Number: {
      double v = n.number;
      if (v < 0 || (v == 0 && std::signbit(v))) {
        out += '-';
        out += format_number(-v);
      } else {
        out += format_number(v);
      }
      break;
    }
    case NodeKind::Variable:
      out += n.var == Var::T ? 't' : n.var == Var::X ? 'x' : 'u';
      break;
    case NodeKind::Negate:
      out += '-';
      unparse_child(*n.a, 3, false, out);
      break;
    case NodeKind::Binary: {
      const char* op = n.op == BinOp::Add ? "+"
                       : n.op == BinOp::Sub ? "-"
                       : n.op == BinOp::Mul ? "*"
                       : n.op == BinOp::Div ? "/"
                                            : "^";
      unparse_child(*n.a, prec, false, out);
      out += op;
      unparse_child(*n.b, prec, true, out);
      break;
    }
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      unparse_child(*n.a, 0, false, out);
      if (n.b) {
        out += ',';
        unparse_child(*n.b, 0, false, out);
      }
      out += ')';
      break;
  }
  if (need_paren) out += ')';
}

}  // namespace
}  // namespace detail

ParseError::ParseError(std::string message, std::size_t offset)
    : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
      offset_(offset) {}

Expr::Expr(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {}

const detail::Node& Expr::root() const {
  if (!root_) throw EvalError("empty expression");
  return *root_;
}

Expr parse(const std::string& source) {
  if (source.empty()) throw ParseError("empty expression", 0);
  detail::Parser p(source);
  return Expr(p.parse_all());
}

Expr make_constant(double value) { return Expr(detail::number(value)); }

double eval(const Expr& e, const Env& env) {
  double v = detail::eval_node(e.root(), env);
  if (!std::isfinite(v)) throw EvalError("expression produced a non-finite value");
  return v;
}

bool check_vars(const Expr& e, VarMask allowed) {
  return (detail::vars_of(e.root()) & ~allowed) == 0;
}

VarMask used_vars(const Expr& e) { return detail::vars_of(e.root()); }

std::string unparse(const Expr& e) {
  std::string out;
  detail::unparse_node(e.root(), 0, false, out);
  return out;
}

bool identical(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return detail::nodes_identical(a.root(), b.root());
}

}  // namespace conewave
