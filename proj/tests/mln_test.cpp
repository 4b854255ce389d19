#include <algorithm>
#include <cmath>
#include <random>

#include <stdexcept>

#include "doctest.h"
#include "liftc/canonical.hpp"
#include "liftc/errors.hpp"
#include "liftc/mln.hpp"
#include "liftc/oracle.hpp"
#include "liftc/parser.hpp"
#include "random_mln.hpp"

using namespace liftc;

namespace {

MLN model(const char* text) { return parse_model(text).mln; }

const char* kExample1 =
    "population x 5\npopulation m 2\n"
    "wf 1.2 : R(x,m) & S(x,m)\n"
    "wf 0.2 : S(x,m) & T(x)\n";

Literal lit(const std::string& pred, std::vector<Term> args, bool positive = true) {
  return {Prv{pred, std::move(args)}, positive};
}

}  // namespace

TEST_CASE("formula normal form") {
  const Literal a = lit("A", {});
  const Literal b = lit("B", {});
  const Literal not_a = lit("A", {}, false);
  const Formula f = Formula::conjunction({b, a, b});
  REQUIRE(f.literals().size() == 2);
  CHECK(f.literals()[0] == a);
  CHECK(Formula::conjunction(f.literals()) == f);
  CHECK(Formula::conjunction({a, not_a}).is_false());
  CHECK(Formula::conjunction({}).is_true());
}

TEST_CASE("condition_literal") {
  SUBCASE("False conjunct collapses the formula") {
    MLN m = model("wf 0.7 : A & B\n");
    MLN c = condition_literal(m, Prv{"A", {}}, false);
    REQUIRE(c.wfs.size() == 1);
    CHECK(c.wfs[0].formula.is_false());
    CHECK(c.wfs[0].weight == 0.7);
  }
  SUBCASE("absent predicate leaves the model unchanged") {
    MLN m = model(kExample1);
    CHECK(condition_literal(m, Prv{"Q", {}}, true) == m);
  }
  SUBCASE("second component conditioned on T(X1)") {
    MLN m = model("population m 1\nwf 0.2 {m} : T(X1)\n");
    MLN c = condition_literal(m, Prv{"T", {Term::constant("X1")}}, true);
    REQUIRE(c.wfs.size() == 1);
    CHECK(c.wfs[0].formula.is_true());
    CHECK(c.wfs[0].lvars == std::vector<std::string>{"m"});
    CHECK(c.prvs.empty());
  }
  SUBCASE("non-ground PRV is rejected") {
    MLN m = model(kExample1);
    CHECK_THROWS_AS(condition_literal(m, Prv{"T", {Term::var("x")}}, true), ModelError);
  }
}

TEST_CASE("connected_components") {
  CHECK(connected_components(MLN{}).empty());
  MLN one = model(kExample1);
  auto c1 = connected_components(one);
  REQUIRE(c1.size() == 1);
  CHECK(canonicalize(c1[0]) == canonicalize(one));

  // The two surviving formulas after removing False ones share no predicate.
  MLN m = model("population m 1\nwf 1.2 {m} : R(X1,m)\nwf 0.2 {m} : T(X1)\n");
  auto parts = connected_components(m);
  REQUIRE(parts.size() == 2);
  std::size_t total = 0;
  for (const auto& p : parts) {
    CHECK(p.wfs.size() == 1);
    total += p.wfs.size();
  }
  CHECK(total == m.wfs.size());
  const bool t_alone = parts[0].predicates() == std::set<std::string>{"T"} ||
                       parts[1].predicates() == std::set<std::string>{"T"};
  CHECK(t_alone);
  for (const auto& p : parts) {
    if (p.predicates() == std::set<std::string>{"T"}) CHECK(p.populations.count("m") == 1);
  }
}

TEST_CASE("canonical keys") {
  const MLN m = model(kExample1);
  CHECK(canonicalize(m) ==
        canonicalize(model("population y 5\npopulation m 2\n"
                           "wf 0.2 : T(y) & S(y,m)\nwf 1.2 : S(y,m) & R(y,m)\n")));
  CHECK(canonicalize(m) !=
        canonicalize(model("population x 5\npopulation m 2\n"
                           "wf 1.3 : R(x,m) & S(x,m)\nwf 0.2 : S(x,m) & T(x)\n")));
  CHECK(canonicalize(m) !=
        canonicalize(model("population x 6\npopulation m 2\n"
                           "wf 1.2 : R(x,m) & S(x,m)\nwf 0.2 : S(x,m) & T(x)\n")));
  CHECK(canonicalize(m) !=
        canonicalize(model("population x 5\npopulation m 2\n"
                           "wf 1.2 : R(x,m) & !S(x,m)\nwf 0.2 : S(x,m) & T(x)\n")));
  CHECK(canonicalize(m) !=
        canonicalize(model("population x 5\npopulation m 2\n"
                           "wf 1.2 : U(x,m) & S(x,m)\nwf 0.2 : S(x,m) & T(x)\n")));
}

TEST_CASE("canonical keys are invariant under renaming and reordering") {
  std::mt19937_64 rng(11);
  testing::RandomSpec spec;
  spec.constant_arg = 0.1;
  spec.extra_lvar = 0.1;
  for (int t = 0; t < 100; ++t) {
    const MLN m = testing::random_model(rng, spec).file.mln;
    // Rename every lvar (x -> v_x) and reverse the formula list.
    std::map<std::string, std::string> ren;
    for (const auto& [name, p] : m.populations) ren[name] = "v" + name;
    std::vector<Population> pops;
    for (const auto& [name, p] : m.populations) pops.emplace_back(ren[name], p.size, p.members);
    std::vector<WeightedFormula> wfs;
    for (auto it = m.wfs.rbegin(); it != m.wfs.rend(); ++it) {
      std::vector<Literal> lits = it->formula.literals();
      std::reverse(lits.begin(), lits.end());
      for (auto& l : lits) {
        for (auto& a : l.prv.args) {
          if (a.is_var()) a.name = ren[a.name];
        }
      }
      std::vector<std::string> L;
      for (const auto& v : it->lvars) L.push_back(ren[v]);
      Formula f = it->formula.kind() == Formula::Kind::Conjunction ? Formula::conjunction(lits) : it->formula;
      wfs.emplace_back(L, f, it->weight);
    }
    MLN r = MLN::from_formulas(pops, wfs);
    for (Prv p : m.prvs) {
      for (auto& a : p.args) {
        if (a.is_var()) a.name = ren[a.name];
      }
      r.prvs.push_back(p);
    }
    r.sync_prvs();
    CHECK(canonicalize(r) == canonicalize(m));

    // Single-field mutation: perturb one weight.
    MLN w = m;
    w.wfs[static_cast<std::size_t>(t) % w.wfs.size()].weight += 0.5;
    CHECK(canonicalize(w) != canonicalize(m));
  }
}

TEST_CASE("split_population") {
  const MLN m = model(kExample1);
  SplitResult r = split_population(m, "x", SizeExpr(2), SizeExpr(3));
  CHECK(r.mln.wfs.size() == 4);
  CHECK(r.mln.population(r.first).concrete_size() == 2);
  CHECK(r.mln.population(r.second).concrete_size() == 3);
  CHECK(r.mln.populations.count("x") == 0);
  CHECK_THROWS_AS(split_population(m, "x", 2, 2), ModelError);

  // Expected 4-WF form, up to renaming.
  const MLN want = model(
      "population a 2\npopulation b 3\npopulation m 2\n"
      "wf 1.2 : R(a,m) & S(a,m)\nwf 1.2 : R(b,m) & S(b,m)\n"
      "wf 0.2 : S(a,m) & T(a)\nwf 0.2 : S(b,m) & T(b)\n");
  CHECK(canonicalize(r.mln) == canonicalize(want));

  SUBCASE("formulas without x are untouched") {
    MLN k = model("population x 3\npopulation y 2\nwf 1.0 : A(x)\nwf 0.5 : B(y)\n");
    MLN s = split_population(k, "x", 1, 2);
    CHECK(s.wfs.size() == 3);
    CHECK(std::count(s.wfs.begin(), s.wfs.end(), k.wfs[1]) == 1);
  }
  SUBCASE("degenerate split keeps Z") {
    MLN k = model("population x 3\nwf 0.5 : A(x) & !B(x)\n");
    const double z = ground_partition(k).as_linear();
    CHECK(ground_partition(split_population(k, "x", 0, 3)).as_linear() == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("split_population preserves Z on random models") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 60; ++t) {
    const MLN m = testing::random_model(rng).file.mln;
    for (const auto& [x, p] : m.populations) {
      const std::int64_t n = p.concrete_size();
      for (std::int64_t k = 0; k <= n; ++k) {
        const MLN s = split_population(m, x, k, n - k);
        CHECK(testing::close(ground_partition(s).as_linear(), ground_partition(m).as_linear(), 1e-9));
      }
    }
  }
}

TEST_CASE("model file parsing") {
  const ModelFile f = parse_model(
      "# comment\npopulation x 5\npopulation m 2\n\n"
      "wf 1.2 : R(x,m) & S(x,m)\nwf 0.5 {x,m} : T(x)\nwf -2 : true\n"
      "observe T(X1) = true\nobserve count T(x) = 2\n");
  CHECK(f.mln.wfs.size() == 3);
  CHECK(f.mln.wfs[1].lvars == std::vector<std::string>{"m", "x"});
  CHECK(f.mln.wfs[2].formula.is_true());
  CHECK(f.mln.population("x").concrete_size() == 5);
  CHECK(f.mln.population("x").member_names().front() == "X1");
  REQUIRE(f.observations.size() == 2);
  CHECK(std::holds_alternative<GroundObservation>(f.observations[0]));
  CHECK(std::get<CountObservation>(f.observations[1]).count == 2);

  SUBCASE("errors report line and column") {
    try {
      parse_model("population x 2\nwf 1.0 R(x)\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 8);
    }
    CHECK_THROWS_AS(parse_model("population x two\n"), ParseError);
    CHECK_THROWS_AS(parse_model("wf 1.0 : R(y)\n"), ParseError);
    CHECK_THROWS_AS(parse_model("population x 2\nwf 1.0 : R(x) & R(x,x)\n"), ParseError);
  }
  SUBCASE("population overrides") {
    ModelFile g = parse_model(kExample1);
    override_populations(g, {{"x", 1}, {"m", 1}});
    CHECK(ground_partition(g.mln).as_linear() ==
          doctest::Approx(5 + std::exp(0.2) + std::exp(1.2) + std::exp(1.4)).epsilon(1e-12));
    CHECK_THROWS_AS(override_populations(g, {{"q", 1}}), ModelError);
  }
}
