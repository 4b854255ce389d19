#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "liftc/engine.hpp"
#include "liftc/errors.hpp"
#include "liftc/heuristics.hpp"
#include "liftc/oracle.hpp"
#include "liftc/parser.hpp"
#include "liftc/shatter.hpp"
#include "random_mln.hpp"

using namespace liftc;

namespace {

MLN sized(const char* text, std::int64_t x, std::int64_t m) {
  ModelFile f = parse_model(text);
  override_populations(f, {{"x", x}, {"m", m}});
  return shatter(f.mln, f.observations);
}

const char* kExample1 =
    "population x 5\npopulation m 2\n"
    "wf 1.2 : R(x,m) & S(x,m)\n"
    "wf 0.2 : S(x,m) & T(x)\n";
const char* kNetwork2 =
    "population x 2\npopulation m 2\n"
    "wf 1.0 : A(x) & B(x) & C(x,m) & D(m) & E(m) & F\n";

const CaseAnalysisOrder kWalkthrough = {"S", "T", "R"};

}  // namespace

TEST_CASE("reference values") {
  CHECK(lifted_Z(sized(kExample1, 1, 1), kWalkthrough, NumericMode::Linear).as_linear() ==
        doctest::Approx(13.596719647741391).epsilon(1e-12));
  // Forced oracle over 2^25 worlds.
  CHECK(lifted_Z(sized(kExample1, 5, 2), kWalkthrough, NumericMode::Linear).as_linear() ==
        doctest::Approx(6916889791.9272356).epsilon(1e-9));
  // Oracle over 2^13 worlds.
  const MLN n2 = sized(kNetwork2, 2, 2);
  CHECK(lifted_Z(n2, greedy_order(n2), NumericMode::Linear).as_linear() ==
        doctest::Approx(9333.6426765102588).epsilon(1e-9));
  CHECK(lifted_Z(MLN{}, {}, NumericMode::Linear).as_linear() == 1.0);
}

TEST_CASE("log space reaches large populations") {
  const MLN big = sized(kNetwork2, 5000, 5000);
  const PartitionValue z = lifted_Z(big, {"F", "D", "E", "A", "B", "C"}, NumericMode::LogSpace);
  CHECK(std::isfinite(z.as_log()));
  // Dominated by the n^2 independent C atoms and F: at least n^2 ln 2.
  CHECK(z.as_log() > 5000.0 * 5000.0 * std::log(2.0));
  CHECK_THROWS_AS(lifted_Z(sized(kNetwork2, 100, 100), {"F", "D", "E", "A", "B", "C"}, NumericMode::Linear),
                  NumericError);
}

TEST_CASE("errors") {
  const MLN m = sized(kExample1, 2, 2);
  CHECK_THROWS_AS(lifted_Z(m, {"S", "T"}, NumericMode::Linear), ModelError);
  MLN symbolic = m;
  symbolic.populations.at("x").size = SizeExpr::symbol("n");
  CHECK_THROWS_AS(lifted_Z(symbolic, kWalkthrough, NumericMode::Linear), ModelError);
}

TEST_CASE("cache statistics") {
  const MLN m = sized(kNetwork2, 3, 3);
  const CaseAnalysisOrder order = greedy_order(m);
  EngineStats cached;
  EngineStats uncached;
  const double a = lifted_Z(m, order, NumericMode::Linear, &cached).as_linear();
  const double b = lifted_Z(m, order, NumericMode::Linear, &uncached, false).as_linear();
  CHECK(a == b);
  CHECK(cached.cache_hits > 0);
  CHECK(uncached.cache_hits == 0);
  CHECK(cached.rule_applications < uncached.rule_applications);

  // Warm evaluation of the same engine returns the stored value.
  Planner planner(order);
  LiftedEngine engine(planner, NumericMode::Linear);
  const double cold = engine.evaluate(m).as_linear();
  const auto hits = engine.stats().cache_hits;
  CHECK(engine.evaluate(m).as_linear() == cold);
  CHECK(engine.stats().cache_hits > hits);
}

TEST_CASE("random models: oracle, modes, cache and order") {
  std::mt19937_64 rng(101);
  testing::RandomSpec spec;
  spec.constant_arg = 0.15;
  spec.extra_lvar = 0.15;
  spec.empty_population = 0.05;
  spec.max_ground_observations = 2;
  for (int t = 0; t < 200; ++t) {
    const testing::RandomModel r = testing::random_model(rng, spec);
    OracleOptions opts;
    opts.evidence = r.evidence;
    const double want = ground_partition(r.file.mln, opts).as_linear();
    const MLN m = shatter(r.file.mln, r.file.observations);
    const CaseAnalysisOrder order = testing::random_order(rng, m);
    const double lin = lifted_Z(m, order, NumericMode::Linear).as_linear();
    CHECK(testing::close(lin, want, 1e-9));
    CHECK(testing::close(std::exp(lifted_Z(m, order, NumericMode::LogSpace).as_log()), lin, 1e-9));
    CHECK(lifted_Z(m, order, NumericMode::Linear, nullptr, false).as_linear() == lin);
    for (int k = 0; k < 5; ++k) {
      CHECK(testing::close(lifted_Z(m, testing::random_order(rng, m), NumericMode::Linear).as_linear(), lin,
                           1e-9));
    }
  }
}
