#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liftc/mln.hpp"

namespace liftc {

enum class RuleKind {
  Decomposer,
  LiftedCase,
  GroundCase,
  Components,
  Simplify,
  TrueEval,
  GroundLVar,
  CacheHit,
};

enum class CombineKind { Sum, Product, Power, Scale };

const char* rule_name(RuleKind k);

// Result of one rule: children plus how their partition functions combine.
//
//   Decomposer  Power: Z = Z(child)^amount
//   LiftedCase  Sum:   Z = sum_{index=0}^{amount} C(amount, index) Z(child)
//                      (one child, symbolic in `index`)
//   GroundCase  Sum:   Z = Z(true child) + Z(false child)
//   Components  Product
//   Simplify    Scale: Z = 2^amount Z(child)
//   GroundLVar  Product over a single child (pass-through)
struct RuleApplication {
  RuleKind kind = RuleKind::Simplify;
  CombineKind combine = CombineKind::Product;
  std::vector<MLN> children;
  SizeExpr amount;
  std::string index;
  std::string detail;  // e.g. the family cased on
};

// Recombine children's values for concrete sizes. `z` evaluates a child MLN
// whose population sizes are all constant.
double combine_values(const RuleApplication& r, const std::function<double(const MLN&)>& z);

// A population whose logical variable appears in L of every formula, in
// every literal and in every family. Returns nullopt when none exists.
std::optional<std::string> find_decomposer(const MLN& m);

// Replace the decomposer by a fresh representative constant; Power(|x|).
RuleApplication decompose(const MLN& m, const std::string& x);

// Case on the number of true groundings of `family` (exactly one lvar).
RuleApplication lifted_case_analysis(const MLN& m, const Prv& family,
                                     const std::string& index = "i");

// Drop False formulas and the families no remaining formula mentions.
// Returns the simplified MLN and the number of eliminated ground atoms.
std::pair<MLN, SizeExpr> simplify(const MLN& m);
RuleApplication simplify_rule(const MLN& m);

// When every formula is True and no family remains: the (weight, count)
// terms with Z = prod exp(weight * count). nullopt otherwise.
std::optional<std::vector<std::pair<double, SizeExpr>>> true_eval_terms(const MLN& m);
// Concrete form of true_eval_terms (sizes must be constant).
std::optional<double> true_eval(const MLN& m);

// Condition a ground family true and false.
RuleApplication ground_case_analysis(const MLN& m, const Prv& family);

// Replace every formula and family mentioning x by one copy per member.
MLN ground_lvar(const MLN& m, const std::string& x);

}  // namespace liftc
