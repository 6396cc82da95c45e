#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "conewave/expr.hpp"

using namespace conewave;

namespace {

double ev(const std::string& s, double t = 0, double x = 0, double u = 0) {
  return eval(parse(s), Env::txu(t, x, u));
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("literals and precedence") {
    CHECK(ev("0") == 0.0);
    CHECK(ev("2+3*4") == 14.0);
    CHECK(ev("2^3^2") == 512.0);  // right associative
    CHECK(ev("-2^2") == -4.0);    // ^ binds tighter than unary minus
    CHECK(ev("(-2)^2") == 4.0);
    CHECK(ev("2*-3") == -6.0);
    CHECK(ev("10/4") == 2.5);
    CHECK(ev("1e2+0.5") == 100.5);
  }

  TEST_CASE("sample expressions from the problem family") {
    const Expr u0 = parse("x*(1-x)^2/10");
    CHECK(eval(u0, Env::only_x(1.0 / 3.0)) == doctest::Approx(2.0 / 135.0).epsilon(1e-15));
    CHECK(ev("t+x", 0, 0) == 0.0);
    CHECK(ev("abs(u)^2", 0, 0, -3) == 9.0);
    CHECK(ev("abs(u)^2.5", 0, 0, -2) == doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-15));
    CHECK(ev("min(2,3)") == 2.0);
    CHECK(ev("max(2,3)") == 3.0);
    CHECK(ev("pow(2,10)") == 1024.0);
    CHECK(ev("atan(1)*4") == doctest::Approx(M_PI).epsilon(1e-15));
  }

  TEST_CASE("syntax errors carry byte offsets") {
    CHECK_THROWS_AS(parse(""), ParseError);
    try {
      parse("1+*2");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 2);
    }
    try {
      parse("2+y");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 2);
      CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("sin(1"), ParseError);
    CHECK_THROWS_AS(parse("min(1)"), ParseError);
    CHECK_THROWS_AS(parse("(1+2"), ParseError);
    CHECK_THROWS_AS(parse("1 2"), ParseError);
  }

  TEST_CASE("evaluation errors instead of silent non-finite values") {
    CHECK_THROWS_AS(ev("1/0"), EvalError);
    CHECK_THROWS_AS(ev("log(0)"), EvalError);
    CHECK_THROWS_AS(ev("log(-1)"), EvalError);
    CHECK_THROWS_AS(ev("sqrt(-1)"), EvalError);
    CHECK_THROWS_AS(ev("0^-1"), EvalError);
    CHECK_THROWS_AS(ev("(-2)^0.5"), EvalError);   // must be written abs(u)^p
    CHECK_THROWS_AS(ev("exp(1e9)"), EvalError);   // overflow surfaces as an error
    // unbound variable
    CHECK_THROWS_AS(eval(parse("u"), Env::tx(0, 0)), EvalError);
  }

  TEST_CASE("check_vars") {
    CHECK_FALSE(check_vars(parse("u"), kVarsTX));
    CHECK(check_vars(parse("x*(1-x)^2/10"), kVarX));
    CHECK(check_vars(parse("abs(u)^2.5"), kVarsTXU));
    CHECK(used_vars(parse("t*x")) == (kVarT | kVarX));
  }

  TEST_CASE("determinism: repeated eval is bit identical") {
    const Expr e = parse("sin(t)*exp(x/3)+abs(u)^1.7-cos(t*x)");
    const Env env = Env::txu(0.7, 0.3, -0.2);
    const double first = eval(e, env);
    for (int k = 0; k < 100; ++k) CHECK(eval(e, env) == first);
  }

  // random well-formed expression strings: parse never crashes, eval yields a
  // finite value or a tagged error, and unparse round-trips to an identical
  // tree
  TEST_CASE("fuzz and round-trip") {
    std::mt19937_64 rng(20240817);
    auto rnd = [&](int n) { return int(rng() % n); };
    std::function<std::string(int)> gen = [&](int depth) -> std::string {
      if (depth <= 0) {
        switch (rnd(4)) {
          case 0: return "t";
          case 1: return "x";
          case 2: return "u";
          default: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", double(rnd(1000)) / 100.0);
            return buf;
          }
        }
      }
      switch (rnd(8)) {
        case 0: return "(" + gen(depth - 1) + "+" + gen(depth - 1) + ")";
        case 1: return "(" + gen(depth - 1) + "-" + gen(depth - 1) + ")";
        case 2: return gen(depth - 1) + "*" + gen(depth - 1);
        case 3: return gen(depth - 1) + "/" + gen(depth - 1);
        case 4: return "-" + gen(depth - 1);
        case 5: return "sin(" + gen(depth - 1) + ")";
        case 6: return "abs(" + gen(depth - 1) + ")^2";
        default: return "min(" + gen(depth - 1) + "," + gen(depth - 1) + ")";
      }
    };
    int evaluated = 0;
    for (int k = 0; k < 500; ++k) {
      const std::string s = gen(1 + rnd(4));
      Expr e;
      CHECK_NOTHROW(e = parse(s));
      const std::string printed = unparse(e);
      Expr e2 = parse(printed);
      CHECK(identical(e, e2));
      try {
        const double v = eval(e, Env::txu(0.5, 0.25, -0.75));
        CHECK(std::isfinite(v));
        ++evaluated;
      } catch (const EvalError&) {
        // tagged failure is the contract for singular points
      }
    }
    CHECK(evaluated > 200);  // most samples are regular
  }
}
