#include <algorithm>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "liftc/codegen.hpp"
#include "liftc/heuristics.hpp"
#include "liftc/parser.hpp"
#include "liftc/shatter.hpp"
#include "random_mln.hpp"

using namespace liftc;

namespace {

MLN model(const std::string& text) {
  const ModelFile f = parse_model(text);
  return shatter(f.mln, f.observations);
}

const char* kExample1 =
    "population x 5\npopulation m 2\n"
    "wf 1.2 : R(x,m) & S(x,m)\n"
    "wf 0.2 : S(x,m) & T(x)\n";
const char* kNetwork3 =
    "population x 2\npopulation m 2\n"
    "wf 1.0 : A(x) & B(x) & C(x) & D(x,m) & E(m) & F(m) & G(m) & H\n";

std::size_t position(const CaseAnalysisOrder& o, const std::string& p) {
  return static_cast<std::size_t>(std::find(o.begin(), o.end(), p) - o.begin());
}

}  // namespace

TEST_CASE("greedy_order") {
  const CaseAnalysisOrder g = greedy_order(model(kExample1));
  REQUIRE(g.size() == 3);
  CHECK(position(g, "T") < position(g, "R"));
  CHECK(position(g, "T") < position(g, "S"));
  CHECK(greedy_order(model("population x 2\nwf 1.0 : Q(x)\n")) == CaseAnalysisOrder{"Q"});
  CHECK(greedy_order(model("wf 1.0 : C & A\nwf 2.0 : B\n")) == CaseAnalysisOrder{"A", "B", "C"});
}

TEST_CASE("nesting_depth") {
  const MLN m = model(kExample1);
  CHECK(nesting_depth(m, {"S", "T", "R"}) == 2);
  CHECK(nesting_depth(model("wf 1.0 : C & A\nwf 2.0 : B & !A\n"), {"A", "B", "C"}) == 0);

  std::mt19937_64 rng(307);
  testing::RandomSpec spec;
  spec.constant_arg = 0.15;
  spec.extra_lvar = 0.15;
  spec.max_size = 4;
  spec.max_ground_atoms = 24;
  for (int t = 0; t < 50; ++t) {
    const ModelFile f = testing::random_model(rng, spec).file;
    const MLN r = shatter(f.mln, f.observations);
    const CaseAnalysisOrder o = testing::random_order(rng, r);
    CHECK(nesting_depth(r, o) == ir::loop_depth(compile(r, o)));
  }
}

TEST_CASE("min_nested_loops") {
  const MLN m = model(kExample1);
  const CaseAnalysisOrder init = {"R", "S", "T"};
  CHECK(min_nested_loops(m, init, 0) == init);
  CHECK(min_nested_loops(m, init, 50, 7) == min_nested_loops(m, init, 50, 7));

  std::mt19937_64 rng(401);
  for (int t = 0; t < 40; ++t) {
    const ModelFile f = testing::random_model(rng).file;
    const MLN r = shatter(f.mln, f.observations);
    const CaseAnalysisOrder o = testing::random_order(rng, r);
    const CaseAnalysisOrder best = min_nested_loops(r, o, 30, static_cast<std::uint64_t>(t));
    CHECK(nesting_depth(r, best) <= nesting_depth(r, o));
    CHECK(std::is_permutation(best.begin(), best.end(), o.begin(), o.end()));
  }

  const MLN n3 = model(kNetwork3);
  const CaseAnalysisOrder g = greedy_order(n3);
  const CaseAnalysisOrder s = min_nested_loops(n3, g, 500);
  CHECK(nesting_depth(n3, s) <= nesting_depth(n3, g));
}

TEST_CASE("order specifications") {
  CHECK(OrderSpec::parse("greedy").kind == OrderSpec::Kind::Greedy);
  CHECK(OrderSpec::parse("minloops").kind == OrderSpec::Kind::MinLoops);
  const OrderSpec e = OrderSpec::parse("S, T,R");
  CHECK(e.kind == OrderSpec::Kind::Explicit);
  CHECK(e.explicit_order == CaseAnalysisOrder{"S", "T", "R"});
  CHECK_THROWS_AS(OrderSpec::parse("S,,R"), std::invalid_argument);
  const MLN m = model(kExample1);
  CHECK(select_order(m, OrderSpec::parse("greedy")) == greedy_order(m));
  CHECK(nesting_depth(m, select_order(m, OrderSpec{})) <= nesting_depth(m, greedy_order(m)));
}
