#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "liftc/size_expr.hpp"

namespace liftc {

// A logical variable (lowercase-initial) or a constant (uppercase-initial).
// Each logical variable names its own population, so the variable name is
// also the population reference.
struct Term {
  enum class Kind : std::uint8_t { Variable, Constant };

  Kind kind = Kind::Variable;
  std::string name;

  static Term var(std::string name) { return {Kind::Variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }
  bool is_var() const { return kind == Kind::Variable; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

// Parametrized random variable R(t1, ..., tk).
struct Prv {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;
  // Distinct logical variables in argument order.
  std::vector<std::string> lvars() const;
  bool mentions(const std::string& lvar) const;
  std::string to_string() const;

  friend auto operator<=>(const Prv&, const Prv&) = default;
  friend bool operator==(const Prv&, const Prv&) = default;
};

struct Literal {
  Prv prv;
  bool positive = true;

  std::string to_string() const;

  // Ordered by (predicate, args, sign).
  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

// Conjunctive formula, always held in normal form: literals sorted and
// deduplicated, complementary pairs collapse to False, an empty conjunction
// is True.
class Formula {
 public:
  enum class Kind : std::uint8_t { Conjunction, True, False };

  Formula() : kind_(Kind::True) {}
  static Formula conjunction(std::vector<Literal> literals);
  static Formula truth() { return Formula(Kind::True); }
  static Formula falsity() { return Formula(Kind::False); }

  Kind kind() const { return kind_; }
  bool is_true() const { return kind_ == Kind::True; }
  bool is_false() const { return kind_ == Kind::False; }
  const std::vector<Literal>& literals() const { return literals_; }
  std::set<std::string> lvars() const;
  std::string to_string() const;

  friend auto operator<=>(const Formula&, const Formula&) = default;
  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  explicit Formula(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<Literal> literals_;
};

// <L, F, w>. L is kept sorted and may strictly contain F's variables.
struct WeightedFormula {
  std::vector<std::string> lvars;
  Formula formula;
  double weight = 0.0;

  WeightedFormula() = default;
  WeightedFormula(std::vector<std::string> l, Formula f, double w);

  std::string to_string() const;
  friend bool operator==(const WeightedFormula&, const WeightedFormula&) = default;
};

struct Population {
  std::string name;
  SizeExpr size;
  std::optional<std::vector<std::string>> members;

  Population() = default;
  Population(std::string n, SizeExpr s,
             std::optional<std::vector<std::string>> m = std::nullopt);

  // Throws ModelError if the size is symbolic.
  std::int64_t concrete_size() const;
  // Listed members, or synthesized ones (x -> X1..Xn) when unlisted.
  std::vector<std::string> member_names() const;

  friend bool operator==(const Population&, const Population&) = default;
};

// Default member names for a population: `x` of size 3 -> X1, X2, X3.
std::vector<std::string> synthesize_members(const std::string& population,
                                            std::int64_t size);

// A set of weighted formulas over populations, together with the PRV
// families whose groundings are the model's random variables. Families are
// pairwise disjoint; every literal in every formula is one of them.
struct MLN {
  std::vector<WeightedFormula> wfs;
  std::map<std::string, Population> populations;
  std::vector<Prv> prvs;

  // Builds an MLN whose families are exactly the PRVs its formulas mention.
  static MLN from_formulas(std::vector<Population> pops,
                           std::vector<WeightedFormula> wfs);

  void add_population(Population p);
  const Population& population(const std::string& lvar) const;
  bool has_prv(const Prv& p) const;
  // Adds literal PRVs missing from `prvs`, sorts and deduplicates.
  void sync_prvs();
  // Drops populations no formula or family references.
  void drop_unused_populations();
  std::set<std::string> predicates() const;
  std::set<std::string> constants() const;
  bool all_sizes_constant() const;

  // Throws ModelError on a broken invariant (unknown lvar, arity clash,
  // literal without family, formula variables outside L).
  void validate() const;
  std::string to_string() const;

  friend bool operator==(const MLN&, const MLN&) = default;
};

// Number of ground random variables: sum over families of the product of
// their population sizes.
SizeExpr ground_variable_count(const MLN& m);

std::string fresh_lvar_name(const MLN& m, const std::string& base);
std::string fresh_constant_name(const MLN& m, const std::string& base);

// Replace every literal whose PRV equals `family` by its truth value under
// `value` and remove the family. Works for any family, ground or not.
MLN condition_family(const MLN& m, const Prv& family, bool value);

// Conditioning on an observed ground PRV. Throws ModelError when `prv`
// contains a logical variable.
MLN condition_literal(const MLN& m, const Prv& prv, bool value);

// Maximal groups of formulas that share a PRV family. Each component keeps
// only the families and populations it references.
std::vector<MLN> connected_components(const MLN& m);

struct SplitResult {
  MLN mln;
  std::string first;   // fresh lvar holding n1 individuals
  std::string second;  // fresh lvar holding n2 individuals
};

// Replace lvar x by two fresh lvars over a partition of its population.
// Every formula and family mentioning x is duplicated.
SplitResult split_population(const MLN& m, const std::string& x,
                             const SizeExpr& n1, const SizeExpr& n2);
// Concrete form; throws ModelError unless n1 + n2 = |x|.
MLN split_population(const MLN& m, const std::string& x, std::int64_t n1,
                     std::int64_t n2);

// Substitute constant `c` for lvar x everywhere and drop x's population.
MLN substitute_lvar(const MLN& m, const std::string& x, const std::string& c);

// Rewrite every population size through `env` (e.g. bind a loop index).
MLN substitute_sizes(const MLN& m, const std::map<std::string, SizeExpr>& env);

}  // namespace liftc
