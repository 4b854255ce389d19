#include <cmath>
#include <limits>

#include <stdexcept>

#include "doctest.h"
#include "liftc/numeric.hpp"

using namespace liftc;

TEST_CASE("log_choose") {
  CHECK(log_choose(2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_choose(9, 0) == 0.0);
  CHECK(log_choose(0, 0) == 0.0);
  // C(50, 25) = 126410606437752, exact integer path.
  CHECK(log_choose(50, 25) == std::log(126410606437752.0));
  CHECK(choose_exact(50, 25) == 126410606437752ULL);
  CHECK(choose(5, 2) == 10.0);
  CHECK_THROWS_AS(log_choose(3, 4), std::out_of_range);
  CHECK_THROWS_AS(log_choose(3, -1), std::out_of_range);
}

TEST_CASE("log_choose beyond the exact range uses log-gamma") {
  const double direct = std::lgamma(1001.0) - std::lgamma(501.0) - std::lgamma(501.0);
  CHECK(log_choose(1000, 500) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-15));
  CHECK(log_factorial(0) == 0.0);
  for (int n = 61; n < 70; ++n) {
    CHECK(log_choose(n, 1) == doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-13));
  }
}

TEST_CASE("log_add and streaming accumulation") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(log_add(-inf, 1.5) == 1.5);
  CHECK(log_add(2.0, -inf) == 2.0);
  CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(log_add(1000.0, 0.0) == 1000.0);
  CHECK(std::isfinite(log_add(1e6, 1e6)));

  double m = -inf;
  double s = 0.0;
  CHECK(log_accumulated(m, s) == -inf);
  for (double x : {1.0, 5.0, 3.0, -2.0}) log_accumulate(m, s, x);
  const double want = std::log(std::exp(1.0) + std::exp(5.0) + std::exp(3.0) + std::exp(-2.0));
  CHECK(log_accumulated(m, s) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("partition values convert between representations") {
  const auto a = PartitionValue::linear(7.0157);
  CHECK(a.repr() == PartitionValue::Repr::Linear);
  CHECK(a.as_log() == doctest::Approx(std::log(7.0157)).epsilon(1e-15));
  const auto b = PartitionValue::log_space(a.as_log());
  CHECK(b.as_linear() == doctest::Approx(7.0157).epsilon(1e-12));
  CHECK(PartitionValue::linear(0.0).as_log() == -std::numeric_limits<double>::infinity());
}
