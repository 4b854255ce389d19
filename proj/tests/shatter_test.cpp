#include <random>

#include <stdexcept>

#include "doctest.h"
#include "liftc/canonical.hpp"
#include "liftc/errors.hpp"
#include "liftc/numeric.hpp"
#include "liftc/oracle.hpp"
#include "liftc/parser.hpp"
#include "liftc/shatter.hpp"
#include "random_mln.hpp"

using namespace liftc;

namespace {

const char* kExample1 =
    "population x 5\npopulation m 2\n"
    "wf 1.2 : R(x,m) & S(x,m)\n"
    "wf 0.2 : S(x,m) & T(x)\n";

ModelFile file(const std::string& text) { return parse_model(text); }

}  // namespace

TEST_CASE("two observed individuals give the 4-formula model") {
  const ModelFile f = file(std::string(kExample1) + "observe T(X1) = true\nobserve T(X2) = true\n");
  const MLN s = shatter(f.mln, f.observations);
  const MLN want = parse_model(
                       "population a 2\npopulation b 3\npopulation m 2\n"
                       "wf 1.2 : R(a,m) & S(a,m)\nwf 1.2 : R(b,m) & S(b,m)\n"
                       "wf 0.2 : S(a,m)\nwf 0.2 : S(b,m) & T(b)\n")
                       .mln;
  CHECK(canonicalize(s) == canonicalize(want));

  OracleOptions opts;
  opts.evidence = {{"T(X1)", true}, {"T(X2)", true}};
  CHECK(testing::close(ground_partition(s, {25, true, {}}).as_linear(),
                       ground_partition(f.mln, opts).as_linear(), 1e-9));
}

TEST_CASE("shatter edge cases") {
  const ModelFile f = file(kExample1);
  CHECK(canonicalize(shatter(f.mln, {})) == canonicalize(f.mln));

  // Counting every individual leaves no residual population.
  const MLN all = apply_count_observation(f.mln, "T", "x", 5);
  CHECK(all.populations.size() == 2);
  CHECK(canonicalize(all) ==
        canonicalize(parse_model("population a 5\npopulation m 2\n"
                                 "wf 1.2 : R(a,m) & S(a,m)\nwf 0.2 : S(a,m)\n")
                         .mln));

  CHECK_THROWS_AS(apply_count_observation(f.mln, "T", "x", 6), ModelError);
  CHECK_THROWS_AS(apply_count_observation(f.mln, "T", "x", -1), ModelError);
  CHECK_THROWS_AS(shatter(f.mln, {GroundObservation{Prv{"R", {Term::constant("X1"), Term::constant("M1")}}, true}}),
                  ModelError);
  CHECK_THROWS_AS(shatter(f.mln, {GroundObservation{Prv{"T", {Term::constant("X1")}}, true},
                                  GroundObservation{Prv{"T", {Term::constant("X1")}}, false}}),
                  ModelError);
  CHECK_THROWS_AS(shatter(f.mln, {CountObservation{"T", "x", 7}}), ModelError);
}

TEST_CASE("count observation of two") {
  const ModelFile f = file(kExample1);
  const MLN c = apply_count_observation(f.mln, "T", "x", 2);
  const MLN want = parse_model(
                       "population a 2\npopulation b 3\npopulation m 2\n"
                       "wf 1.2 : R(a,m) & S(a,m)\nwf 1.2 : R(b,m) & S(b,m)\n"
                       "wf 0.2 : S(a,m)\nwf 0.2 {b,m} : false\n")
                       .mln;
  CHECK(canonicalize(c) == canonicalize(want));

  // i = 0 is the same as T false everywhere.
  const MLN zero = apply_count_observation(f.mln, "T", "x", 0);
  OracleOptions opts;
  opts.force = true;
  for (int k = 1; k <= 5; ++k) opts.evidence["T(X" + std::to_string(k) + ")"] = false;
  CHECK(testing::close(ground_partition(zero, {25, true, {}}).as_linear(),
                       ground_partition(f.mln, opts).as_linear(), 1e-9));
}

TEST_CASE("case on S(X1,m): the i-th conditioned model") {
  const MLN m = parse_model("population m 2\nwf 1.2 : R(X1,m) & S(X1,m)\nwf 0.2 : S(X1,m) & T(X1)\n").mln;
  const MLN c = condition_count(m, Prv{"S", {Term::constant("X1"), Term::var("m")}}, "m", 1).mln;
  const MLN want = parse_model(
                       "population a 1\npopulation b 1\n"
                       "wf 1.2 : R(X1,a)\nwf 1.2 {b} : false\n"
                       "wf 0.2 {a} : T(X1)\nwf 0.2 {b} : false\n")
                       .mln;
  // R(X1,b) stays a family even though only False formulas mention it.
  MLN with_family = want;
  with_family.prvs.push_back(Prv{"R", {Term::constant("X1"), Term::var("b")}});
  with_family.sync_prvs();
  CHECK(canonicalize(c) == canonicalize(with_family));
}

TEST_CASE("count identity on random unary predicates") {
  std::mt19937_64 rng(17);
  int checked = 0;
  while (checked < 30) {
    const MLN m = testing::random_model(rng).file.mln;
    for (const auto& p : m.prvs) {
      const auto lv = p.lvars();
      if (lv.size() != 1 || p.arity() != 1) continue;
      const std::int64_t n = m.population(lv[0]).concrete_size();
      double sum = 0.0;
      for (std::int64_t i = 0; i <= n; ++i) {
        sum += choose(n, i) * ground_partition(apply_count_observation(m, p.predicate, lv[0], i)).as_linear();
      }
      CHECK(testing::close(sum, ground_partition(m).as_linear(), 1e-9));
      ++checked;
      break;
    }
  }
}

TEST_CASE("shattered models match oracle evidence") {
  std::mt19937_64 rng(23);
  testing::RandomSpec spec;
  spec.max_ground_observations = 3;
  spec.constant_arg = 0.15;
  for (int t = 0; t < 100; ++t) {
    const testing::RandomModel r = testing::random_model(rng, spec);
    OracleOptions opts;
    opts.evidence = r.evidence;
    const MLN s = shatter(r.file.mln, r.file.observations);
    CHECK(testing::close(ground_partition(s).as_linear(), ground_partition(r.file.mln, opts).as_linear(),
                         1e-9));
  }
}
