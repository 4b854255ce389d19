#include <cmath>
#include <random>

#include <stdexcept>

#include "doctest.h"
#include "liftc/errors.hpp"
#include "liftc/oracle.hpp"
#include "liftc/parser.hpp"
#include "random_mln.hpp"

using namespace liftc;

namespace {

MLN model(const std::string& text) { return parse_model(text).mln; }

const char* kExample1 =
    "population x 5\npopulation m 2\n"
    "wf 1.2 : R(x,m) & S(x,m)\n"
    "wf 0.2 : S(x,m) & T(x)\n";

}  // namespace

TEST_CASE("eta on the worked world") {
  const MLN m = model(kExample1);
  const World w = make_world(m, {"R(X1,M1)", "S(X1,M1)", "S(X1,M2)", "T(X1)"});
  CHECK(eta(m, m.wfs[0], w) == 1);
  CHECK(eta(m, m.wfs[1], w) == 2);
  CHECK(eta(m, WeightedFormula({}, Formula::truth(), 1.0), w) == 1);
  // A variable of L outside the formula multiplies by its population size.
  CHECK(eta(m, WeightedFormula({"m", "x"}, Formula::truth(), 1.0), w) == 10);

  CHECK(world_weight(m, w).as_linear() ==
        doctest::Approx(std::exp(1 * 1.2) * std::exp(2 * 0.2)).epsilon(1e-15));
  CHECK(world_weight(m, make_world(m, {})).as_linear() == 1.0);
  const MLN t = model("wf 0.8 : true\n");
  CHECK(world_weight(t, make_world(t, {})).as_linear() == doctest::Approx(std::exp(0.8)));
}

TEST_CASE("ground_partition reference values") {
  MLN small = model("population x 1\npopulation m 1\n"
                    "wf 1.2 : R(x,m) & S(x,m)\nwf 0.2 : S(x,m) & T(x)\n");
  CHECK(ground_partition(small).as_linear() ==
        doctest::Approx(5 + std::exp(0.2) + std::exp(1.2) + std::exp(1.4)).epsilon(1e-14));
  CHECK(ground_partition(small).as_linear() == doctest::Approx(13.5967).epsilon(1e-5));
  CHECK(ground_partition(MLN{}).as_linear() == 1.0);
  CHECK(ground_partition(model("population x 2\nwf 0.5 : T(x)\n")).as_linear() ==
        doctest::Approx(7.0157).epsilon(1e-4));

  // Families without formulas: each world weighs 1.
  MLN bare;
  bare.add_population(Population("x", SizeExpr(3)));
  bare.prvs.push_back(Prv{"A", {Term::var("x")}});
  bare.prvs.push_back(Prv{"B", {}});
  CHECK(ground_partition(bare).as_linear() == 16.0);
}

TEST_CASE("independent groundings give (e^w + 1)^n") {
  for (int n = 1; n <= 5; ++n) {
    for (double w : {-1.0, 0.0, 0.5, 2.0}) {
      char text[64];
      std::snprintf(text, sizeof text, "population x %d\nwf %.17g : T(x)\n", n, w);
      CHECK(testing::close(ground_partition(model(text)).as_linear(), std::pow(std::exp(w) + 1, n),
                           1e-9));
    }
  }
}

TEST_CASE("oracle bound and evidence") {
  const MLN m = model(kExample1);  // 25 ground atoms
  CHECK_THROWS_AS(ground_partition(m), OracleLimitError);
  try {
    ground_partition(m);
  } catch (const OracleLimitError& e) {
    CHECK(e.ground_vars() == 25);
  }
  OracleOptions opts;
  opts.evidence = {{"T(X1)", true}, {"T(X2)", false}};
  CHECK_NOTHROW(ground_partition(m, opts));
  opts.evidence = {{"T(X9)", true}};
  CHECK_THROWS_AS(ground_partition(m, opts), ModelError);
}

TEST_CASE("oracle invariants on random models") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 60; ++t) {
    const MLN m = testing::random_model(rng).file.mln;
    const double z = ground_partition(m).as_linear();

    MLN scaled = m;
    scaled.wfs.emplace_back(std::vector<std::string>{}, Formula::truth(), 0.75);
    CHECK(testing::close(ground_partition(scaled).as_linear(), z * std::exp(0.75), 1e-12));

    MLN reordered = m;
    std::reverse(reordered.wfs.begin(), reordered.wfs.end());
    CHECK(testing::close(ground_partition(reordered).as_linear(), z, 1e-12));

    for (const auto& p : m.prvs) {
      if (!p.is_ground()) continue;
      const double split = ground_partition(condition_literal(m, p, true)).as_linear() +
                           ground_partition(condition_literal(m, p, false)).as_linear();
      CHECK(testing::close(split, z, 1e-12));
    }
  }
}
