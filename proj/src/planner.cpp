#include "liftc/planner.hpp"

#include <algorithm>

#include "liftc/canonical.hpp"
#include "liftc/errors.hpp"
#include "liftc/rules.hpp"
#include "liftc/shatter.hpp"

namespace liftc {

const char* plan_kind_name(PlanKind k) {
  switch (k) {
    case PlanKind::TrueEval: return "true-eval";
    case PlanKind::Simplify: return "simplify";
    case PlanKind::Components: return "components";
    case PlanKind::Decomposer: return "decomposer";
    case PlanKind::GroundCase: return "ground-case";
    case PlanKind::LiftedCase: return "lifted-case";
    case PlanKind::GroundLVar: return "ground-lvar";
  }
  return "?";
}

std::map<std::string, int> slot_symbols(std::size_t num_slots) {
  std::map<std::string, int> out;
  for (std::size_t k = 0; k < num_slots; ++k) {
    out[canonical_size_symbol(k)] = static_cast<int>(k);
  }
  out[kCaseIndex] = static_cast<int>(num_slots);
  return out;
}

Planner::Planner(CaseAnalysisOrder order) : order_(std::move(order)) {
  for (std::size_t i = 0; i < order_.size(); ++i) rank_.emplace(order_[i], i);
}

std::pair<int, std::vector<SizeExpr>> Planner::intern(const MLN& m) {
  CanonicalForm f = canonical_form(m);
  auto it = by_structure_.find(f.structure);
  int sid;
  if (it != by_structure_.end()) {
    sid = it->second;
  } else {
    sid = static_cast<int>(shapes_.size());
    by_structure_.emplace(f.structure, sid);
    shapes_.push_back(Shape{f.structure, std::move(f.mln), std::nullopt, {}});
  }
  return {sid, std::move(f.sizes)};
}

PlanChild Planner::child_of(const MLN& m) {
  auto [sid, sizes] = intern(m);
  return {sid, std::move(sizes)};
}

const Plan& Planner::plan(int sid) {
  Shape& s = shapes_.at(static_cast<std::size_t>(sid));
  if (!s.plan) {
    Plan p = make_plan(sid);
    shapes_.at(static_cast<std::size_t>(sid)).plan = std::move(p);
  }
  return *shapes_.at(static_cast<std::size_t>(sid)).plan;
}

namespace {

std::size_t slot_of(const std::string& pop) { return std::stoul(pop.substr(1)); }

}  // namespace

Plan Planner::make_plan(int sid) {
  const MLN m = shape(sid);  // copy: interning may grow shapes_
  Plan p;

  if (auto terms = true_eval_terms(m)) {
    p.kind = PlanKind::TrueEval;
    p.terms = std::move(*terms);
    return p;
  }

  if (auto [simplified, eliminated] = simplify(m);
      simplified.wfs.size() != m.wfs.size() || simplified.prvs.size() != m.prvs.size()) {
    p.kind = PlanKind::Simplify;
    p.amount = std::move(eliminated);
    p.children.push_back(child_of(simplified));
    return p;
  }

  if (auto comps = connected_components(m); comps.size() > 1) {
    p.kind = PlanKind::Components;
    for (const auto& c : comps) p.children.push_back(child_of(c));
    return p;
  }

  if (m.constants().empty()) {
    if (auto x = find_decomposer(m)) {
      RuleApplication r = decompose(m, *x);
      p.kind = PlanKind::Decomposer;
      p.amount = r.amount;
      p.detail = *x;
      p.children.push_back(child_of(r.children[0]));
      return p;
    }
  }

  for (const auto& pred : m.predicates()) {
    if (!rank_.count(pred)) {
      throw ModelError("case-analysis order is missing predicate '" + pred + "'");
    }
  }
  const Prv* chosen = nullptr;
  for (const auto& f : m.prvs) {
    if (f.lvars().size() > 1) continue;
    if (!chosen || rank_.at(f.predicate) < rank_.at(chosen->predicate)) chosen = &f;
  }
  if (chosen) {
    p.detail = chosen->to_string();
    if (chosen->is_ground()) {
      p.kind = PlanKind::GroundCase;
      p.children.push_back(child_of(condition_family(m, *chosen, true)));
      p.children.push_back(child_of(condition_family(m, *chosen, false)));
    } else {
      const std::string x = chosen->lvars()[0];
      p.kind = PlanKind::LiftedCase;
      p.amount = m.population(x).size;
      p.children.push_back(
          child_of(condition_count(m, *chosen, x, SizeExpr::symbol(kCaseIndex)).mln));
    }
    return p;
  }

  // Fallback: ground the lowest slot that occurs in a family.
  std::optional<std::size_t> slot;
  for (const auto& f : m.prvs) {
    for (const auto& v : f.lvars()) {
      std::size_t k = slot_of(v);
      if (!slot || k < *slot) slot = k;
    }
  }
  if (!slot) throw std::logic_error("no rule applies to shape " + structure(sid));
  p.kind = PlanKind::GroundLVar;
  p.grounded_slot = *slot;
  p.amount = SizeExpr::symbol(canonical_size_symbol(*slot));
  p.detail = canonical_population_name(*slot);
  return p;
}

const PlanChild& Planner::ground_child(int sid, std::int64_t size) {
  const Plan& p = plan(sid);
  if (p.kind != PlanKind::GroundLVar) throw std::logic_error("ground_child on a non-grounding plan");
  {
    const Shape& s = shapes_.at(static_cast<std::size_t>(sid));
    auto it = s.ground_children.find(size);
    if (it != s.ground_children.end()) return it->second;
  }
  const std::size_t slot = p.grounded_slot;
  MLN m = substitute_sizes(shape(sid), {{canonical_size_symbol(slot), SizeExpr(size)}});
  PlanChild c = child_of(ground_lvar(m, canonical_population_name(slot)));
  auto& children = shapes_.at(static_cast<std::size_t>(sid)).ground_children;
  return children.emplace(size, std::move(c)).first->second;
}

}  // namespace liftc
