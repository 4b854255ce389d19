#include "liftc/rules.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "liftc/errors.hpp"
#include "liftc/numeric.hpp"
#include "liftc/shatter.hpp"

namespace liftc {

const char* rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::Decomposer: return "decomposer";
    case RuleKind::LiftedCase: return "lifted-case";
    case RuleKind::GroundCase: return "ground-case";
    case RuleKind::Components: return "components";
    case RuleKind::Simplify: return "simplify";
    case RuleKind::TrueEval: return "true-eval";
    case RuleKind::GroundLVar: return "ground-lvar";
    case RuleKind::CacheHit: return "cache-hit";
  }
  return "?";
}

namespace {

std::int64_t need_constant(const SizeExpr& e, const char* what) {
  auto c = e.constant();
  if (!c) throw ModelError(std::string(what) + " is symbolic: " + e.to_string());
  return *c;
}

bool in_lvars(const WeightedFormula& wf, const std::string& x) {
  return std::binary_search(wf.lvars.begin(), wf.lvars.end(), x);
}

}  // namespace

double combine_values(const RuleApplication& r, const std::function<double(const MLN&)>& z) {
  switch (r.combine) {
    case CombineKind::Power:
      return std::pow(z(r.children.at(0)),
                      static_cast<double>(need_constant(r.amount, "exponent")));
    case CombineKind::Scale:
      return std::pow(2.0, static_cast<double>(need_constant(r.amount, "eliminated count"))) *
             z(r.children.at(0));
    case CombineKind::Product: {
      double v = 1.0;
      for (const auto& c : r.children) v *= z(c);
      return v;
    }
    case CombineKind::Sum: {
      if (r.kind != RuleKind::LiftedCase) {
        double v = 0.0;
        for (const auto& c : r.children) v += z(c);
        return v;
      }
      const std::int64_t n = need_constant(r.amount, "case-analysis bound");
      double v = 0.0;
      for (std::int64_t i = 0; i <= n; ++i) {
        v += choose(n, i) * z(substitute_sizes(r.children.at(0), {{r.index, SizeExpr(i)}}));
      }
      return v;
    }
  }
  return 0.0;
}

std::optional<std::string> find_decomposer(const MLN& m) {
  for (const auto& [x, pop] : m.populations) {
    bool used = false;
    bool ok = true;
    for (const auto& wf : m.wfs) {
      if (!in_lvars(wf, x)) {
        ok = false;
        break;
      }
      used = true;
      for (const auto& l : wf.formula.literals()) {
        if (!l.prv.mentions(x)) ok = false;
      }
    }
    for (const auto& p : m.prvs) {
      if (!p.mentions(x)) ok = false;
      used = true;
    }
    if (ok && used) return x;
  }
  return std::nullopt;
}

RuleApplication decompose(const MLN& m, const std::string& x) {
  RuleApplication r;
  r.kind = RuleKind::Decomposer;
  r.combine = CombineKind::Power;
  r.amount = m.population(x).size;
  const std::string rep = fresh_constant_name(m, synthesize_members(x, 1).front());
  MLN child = substitute_lvar(m, x, rep);
  child.drop_unused_populations();
  r.children.push_back(std::move(child));
  r.detail = x;
  return r;
}

RuleApplication lifted_case_analysis(const MLN& m, const Prv& family, const std::string& index) {
  const auto lv = family.lvars();
  if (lv.size() != 1) {
    throw ModelError("lifted case analysis needs exactly one logical variable in " +
                     family.to_string());
  }
  RuleApplication r;
  r.kind = RuleKind::LiftedCase;
  r.combine = CombineKind::Sum;
  r.amount = m.population(lv[0]).size;
  r.index = index;
  r.children.push_back(condition_count(m, family, lv[0], SizeExpr::symbol(index)).mln);
  r.detail = family.to_string();
  return r;
}

std::pair<MLN, SizeExpr> simplify(const MLN& m) {
  MLN out;
  out.populations = m.populations;
  std::set<Prv> mentioned;
  for (const auto& wf : m.wfs) {
    if (wf.formula.is_false()) continue;
    for (const auto& l : wf.formula.literals()) mentioned.insert(l.prv);
    out.wfs.push_back(wf);
  }
  SizeExpr eliminated;
  for (const auto& p : m.prvs) {
    if (mentioned.count(p)) {
      out.prvs.push_back(p);
      continue;
    }
    SizeExpr count(1);
    for (const auto& v : p.lvars()) count = count * m.population(v).size;
    eliminated = eliminated + count;
  }
  out.drop_unused_populations();
  return {std::move(out), std::move(eliminated)};
}

RuleApplication simplify_rule(const MLN& m) {
  auto [child, eliminated] = simplify(m);
  RuleApplication r;
  r.kind = RuleKind::Simplify;
  r.combine = CombineKind::Scale;
  r.amount = std::move(eliminated);
  r.children.push_back(std::move(child));
  return r;
}

std::optional<std::vector<std::pair<double, SizeExpr>>> true_eval_terms(const MLN& m) {
  if (!m.prvs.empty()) return std::nullopt;
  std::vector<std::pair<double, SizeExpr>> terms;
  for (const auto& wf : m.wfs) {
    if (!wf.formula.is_true()) return std::nullopt;
    SizeExpr count(1);
    for (const auto& v : wf.lvars) count = count * m.population(v).size;
    terms.emplace_back(wf.weight, std::move(count));
  }
  return terms;
}

std::optional<double> true_eval(const MLN& m) {
  auto terms = true_eval_terms(m);
  if (!terms) return std::nullopt;
  double v = 1.0;
  for (const auto& [w, count] : *terms) {
    v *= std::exp(w * static_cast<double>(need_constant(count, "formula count")));
  }
  return v;
}

RuleApplication ground_case_analysis(const MLN& m, const Prv& family) {
  if (!family.is_ground()) {
    throw ModelError("ground case analysis needs a ground family, got " + family.to_string());
  }
  if (!m.has_prv(family)) throw ModelError(family.to_string() + " is not a family of the model");
  RuleApplication r;
  r.kind = RuleKind::GroundCase;
  r.combine = CombineKind::Sum;
  r.children.push_back(condition_family(m, family, true));
  r.children.push_back(condition_family(m, family, false));
  r.detail = family.to_string();
  return r;
}

MLN ground_lvar(const MLN& m, const std::string& x) {
  const Population& pop = m.population(x);
  std::vector<std::string> members = pop.member_names();
  const std::set<std::string> taken = m.constants();
  MLN probe = m;
  for (auto& c : members) {
    if (taken.count(c)) c = fresh_constant_name(probe, c);
    probe.prvs.push_back(Prv{"__reserved", {Term::constant(c)}});
  }

  MLN touching;
  MLN rest;
  touching.populations = rest.populations = m.populations;
  for (const auto& wf : m.wfs) (in_lvars(wf, x) ? touching : rest).wfs.push_back(wf);
  for (const auto& p : m.prvs) (p.mentions(x) ? touching : rest).prvs.push_back(p);

  MLN out = rest;
  for (const auto& c : members) {
    MLN copy = substitute_lvar(touching, x, c);
    out.wfs.insert(out.wfs.end(), copy.wfs.begin(), copy.wfs.end());
    out.prvs.insert(out.prvs.end(), copy.prvs.begin(), copy.prvs.end());
  }
  out.populations.erase(x);
  std::sort(out.prvs.begin(), out.prvs.end());
  out.prvs.erase(std::unique(out.prvs.begin(), out.prvs.end()), out.prvs.end());
  out.drop_unused_populations();
  return out;
}

}  // namespace liftc
