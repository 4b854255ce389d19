#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "liftc/mln.hpp"

namespace liftc {

// Evidence that a ground atom has a given value.
struct GroundObservation {
  Prv prv;
  bool value = true;
};

// Evidence that exactly `count` groundings of unary `predicate(lvar)` hold.
struct CountObservation {
  std::string predicate;
  std::string lvar;
  std::int64_t count = 0;
};

using Observation = std::variant<GroundObservation, CountObservation>;

// Condition on all observations, splitting populations so that individuals
// within each resulting population carry identical evidence. Constants that
// appear in formulas and belong to a population are split off into their
// own singleton cells first.
MLN shatter(const MLN& m, const std::vector<Observation>& obs);

// Split x into (i, |x| - i) and condition `family` true on the first part and
// false on the second. `family` must have x as its only logical variable.
// Sizes may be symbolic; the fresh lvar names are returned alongside.
SplitResult condition_count(const MLN& m, const Prv& family, const std::string& x,
                            const SizeExpr& i);

// Concrete count observation on unary predicate `pred` over x.
MLN apply_count_observation(const MLN& m, const std::string& pred, const std::string& x,
                            std::int64_t i);

}  // namespace liftc
