#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "liftc/mln.hpp"

namespace liftc {

// Ranked predicate names; case analysis picks the first predicate in the
// list that has an eligible family.
using CaseAnalysisOrder = std::vector<std::string>;

enum class PlanKind { TrueEval, Simplify, Components, Decomposer, GroundCase, LiftedCase, GroundLVar };

const char* plan_kind_name(PlanKind k);

// Symbol standing for the case index inside a LiftedCase child's sizes.
inline constexpr const char* kCaseIndex = "i";

// A child shape and the sizes binding its slots, written over the parent's
// slot symbols N0..Nk (and kCaseIndex under a LiftedCase).
struct PlanChild {
  int sid = -1;
  std::vector<SizeExpr> args;
};

// The rule chosen for a canonical shape. Plans are size-independent; only
// GroundLVar defers to ground_child() for the concrete size.
struct Plan {
  PlanKind kind = PlanKind::TrueEval;
  std::vector<PlanChild> children;
  std::vector<std::pair<double, SizeExpr>> terms;  // TrueEval: prod exp(w * count)
  // Simplify: eliminated atoms. Decomposer: exponent. LiftedCase: upper
  // bound of the case index. GroundLVar: size of the grounded population.
  SizeExpr amount;
  std::size_t grounded_slot = 0;  // GroundLVar
  std::string detail;
};

// Interns canonical shapes and decides, once per shape, which rule applies:
// true-eval, simplify, components, decompose (constant-free shapes where one
// population covers everything), case analysis by `order`, and grounding a
// population as the fallback.
class Planner {
 public:
  explicit Planner(CaseAnalysisOrder order);

  // Shape id of m plus the sizes of its slots (in m's size symbols).
  std::pair<int, std::vector<SizeExpr>> intern(const MLN& m);
  const Plan& plan(int sid);
  // Child of a GroundLVar shape whose grounded population has `size`
  // individuals; its args are over the parent's slots.
  const PlanChild& ground_child(int sid, std::int64_t size);

  const MLN& shape(int sid) const { return shapes_.at(static_cast<std::size_t>(sid)).rep; }
  const std::string& structure(int sid) const {
    return shapes_.at(static_cast<std::size_t>(sid)).structure;
  }
  std::size_t num_slots(int sid) const {
    return shapes_.at(static_cast<std::size_t>(sid)).rep.populations.size();
  }
  std::size_t shape_count() const { return shapes_.size(); }
  const CaseAnalysisOrder& order() const { return order_; }

 private:
  struct Shape {
    std::string structure;
    MLN rep;
    std::optional<Plan> plan;
    std::map<std::int64_t, PlanChild> ground_children;
  };

  Plan make_plan(int sid);
  PlanChild child_of(const MLN& m);

  CaseAnalysisOrder order_;
  std::map<std::string, std::size_t> rank_;
  std::deque<Shape> shapes_;
  std::unordered_map<std::string, int> by_structure_;
};

// Symbols N0..Nk of a shape with k+1 slots, followed by kCaseIndex.
std::map<std::string, int> slot_symbols(std::size_t num_slots);

}  // namespace liftc
