#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "liftc/mln.hpp"
#include "liftc/planner.hpp"

namespace liftc {

// Ranks predicates by the largest number of logical variables in any of
// their atoms, then by number of occurrences in formulas, then by name.
CaseAnalysisOrder greedy_order(const MLN& m);

// Deepest loop nesting of compile(m, o), found by walking the plans with
// sizes tracked only as known constants or unknown loop-dependent values.
// m must be shattered with constant sizes.
std::size_t nesting_depth(const MLN& m, const CaseAnalysisOrder& o);

// Local search over orders: each step swaps an adjacent pair or a random
// pair (equal odds) and keeps the result unless it increases the depth.
CaseAnalysisOrder min_nested_loops(const MLN& m, const CaseAnalysisOrder& init,
                                   std::size_t budget = 200, std::uint64_t seed = 0);

// How a command picks its case-analysis order.
struct OrderSpec {
  enum class Kind { Greedy, MinLoops, Explicit };
  Kind kind = Kind::MinLoops;
  CaseAnalysisOrder explicit_order;
  std::size_t budget = 200;
  std::uint64_t seed = 0;

  // "greedy", "minloops" or a comma-separated predicate list.
  static OrderSpec parse(const std::string& text);
};

// Order for a shattered MLN. Explicit orders are returned as given; the
// planner reports predicates they miss.
CaseAnalysisOrder select_order(const MLN& m, const OrderSpec& spec);

}  // namespace liftc
