#include <stdexcept>

#include "doctest.h"
#include "liftc/size_expr.hpp"

using liftc::SizeExpr;
using liftc::SlotPolynomial;

TEST_CASE("size expressions keep a normal form") {
  const SizeExpr n = SizeExpr::symbol("n");
  const SizeExpr i = SizeExpr::symbol("i");
  CHECK((n - n).is_zero());
  CHECK((n + i) == (i + n));
  CHECK((n * (i + 1)) == (n * i + n));
  CHECK((SizeExpr(2) - i).to_string() == "2 - i");
  CHECK((n * i * 3).to_string() == "3*i*n");
  CHECK(SizeExpr().to_string() == "0");
  CHECK((SizeExpr(0) - n).to_string() == "-n");
}

TEST_CASE("evaluation, substitution and symbols") {
  const SizeExpr e = SizeExpr::symbol("a") * SizeExpr::symbol("b") - 4;
  CHECK(e.evaluate({{"a", 3}, {"b", 5}}) == 11);
  CHECK_THROWS_AS(e.evaluate({{"a", 3}}), std::out_of_range);
  CHECK(e.symbols() == std::set<std::string>{"a", "b"});
  CHECK(e.mentions("a"));
  CHECK_FALSE(e.mentions("c"));
  const SizeExpr s = e.substitute({{"a", SizeExpr(2)}});
  CHECK(s == SizeExpr::symbol("b") * 2 - 4);
  CHECK_FALSE(s.is_constant());
  CHECK(SizeExpr(7).constant() == 7);
  CHECK_FALSE(s.constant().has_value());
}

TEST_CASE("slot polynomials agree with evaluate") {
  const SizeExpr e = SizeExpr::symbol("x") * SizeExpr::symbol("x") + SizeExpr::symbol("y") * 3 - 1;
  SlotPolynomial p(e, {{"x", 0}, {"y", 1}});
  const std::int64_t v[] = {4, 2};
  CHECK(p(v) == e.evaluate({{"x", 4}, {"y", 2}}));
  CHECK_THROWS_AS(SlotPolynomial(e, {{"x", 0}}), std::invalid_argument);
}
