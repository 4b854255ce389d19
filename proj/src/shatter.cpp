#include "liftc/shatter.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "liftc/errors.hpp"

namespace liftc {

namespace {

Prv rename(const Prv& p, const std::string& from, const std::string& to) {
  Prv out = p;
  for (auto& t : out.args) {
    if (t.is_var() && t.name == from) t = Term::var(to);
  }
  return out;
}

// Give every concretely sized population an explicit member list so that
// splits keep the original individual names.
void materialize_members(MLN& m) {
  for (auto& [name, p] : m.populations) {
    if (!p.members && p.size.is_constant()) p.members = p.member_names();
  }
}

std::optional<std::string> owner_of(const MLN& m, const std::string& constant) {
  for (const auto& [name, p] : m.populations) {
    if (p.members &&
        std::find(p.members->begin(), p.members->end(), constant) != p.members->end()) {
      return name;
    }
  }
  return std::nullopt;
}

// Reorder x's members so `front` come first, preserving relative order.
void move_to_front(MLN& m, const std::string& x, const std::vector<std::string>& front) {
  Population& p = m.populations.at(x);
  std::vector<std::string> rest;
  for (const auto& c : *p.members) {
    if (std::find(front.begin(), front.end(), c) == front.end()) rest.push_back(c);
  }
  std::vector<std::string> all = front;
  all.insert(all.end(), rest.begin(), rest.end());
  p.members = std::move(all);
}

MLN isolate_constants(MLN m) {
  while (true) {
    std::optional<std::pair<std::string, std::string>> hit;
    for (const auto& c : m.constants()) {
      if (auto x = owner_of(m, c)) {
        hit.emplace(*x, c);
        break;
      }
    }
    if (!hit) return m;
    const auto& [x, c] = *hit;
    move_to_front(m, x, {c});
    const std::int64_t n = m.population(x).concrete_size();
    SplitResult r = split_population(m, x, SizeExpr(1), SizeExpr(n - 1));
    m = substitute_lvar(r.mln, r.first, c);
  }
}

const Prv* find_family(const MLN& m, const Prv& p) {
  auto it = std::find(m.prvs.begin(), m.prvs.end(), p);
  return it == m.prvs.end() ? nullptr : &*it;
}

bool predicate_present(const MLN& m, const std::string& pred) {
  return m.predicates().count(pred) > 0;
}

}  // namespace

SplitResult condition_count(const MLN& m, const Prv& family, const std::string& x,
                            const SizeExpr& i) {
  const auto lv = family.lvars();
  if (lv.size() != 1 || lv[0] != x) {
    throw ModelError("count conditioning needs a family over exactly " + x + ", got " +
                     family.to_string());
  }
  if (!m.has_prv(family)) throw ModelError(family.to_string() + " is not a family of the model");
  const SizeExpr n = m.population(x).size;
  SplitResult r = split_population(m, x, i, n - i);
  r.mln = condition_family(r.mln, rename(family, x, r.first), true);
  r.mln = condition_family(r.mln, rename(family, x, r.second), false);
  return r;
}

MLN apply_count_observation(const MLN& m, const std::string& pred, const std::string& x,
                            std::int64_t i) {
  const std::int64_t n = m.population(x).concrete_size();
  if (i < 0 || i > n) {
    throw ModelError("count " + std::to_string(i) + " for " + pred + "(" + x +
                     ") is outside 0.." + std::to_string(n));
  }
  Prv family{pred, {Term::var(x)}};
  if (!m.has_prv(family)) {
    throw ModelError(pred + " is not a unary predicate over " + x + " in the model");
  }
  MLN base = m;
  materialize_members(base);
  // All or nothing observed: no split needed.
  if (i == 0 || i == n) return condition_family(base, family, i == n);
  return condition_count(base, family, x, SizeExpr(i)).mln;
}

MLN shatter(const MLN& m, const std::vector<Observation>& obs) {
  if (obs.empty() && m.constants().empty()) return m;
  MLN out = m;
  materialize_members(out);

  std::set<std::string> counted;  // populations created by count splits
  for (const auto& o : obs) {
    const auto* c = std::get_if<CountObservation>(&o);
    if (!c) continue;
    if (!out.populations.count(c->lvar)) {
      throw ModelError("count observation on unknown logical variable '" + c->lvar + "'");
    }
    out = apply_count_observation(out, c->predicate, c->lvar, c->count);
    counted.insert(c->lvar);
    for (const auto& [name, p] : out.populations) {
      if (!m.populations.count(name)) counted.insert(name);
    }
  }

  out = isolate_constants(std::move(out));

  // Ground evidence, deduplicated and checked for contradictions.
  std::map<Prv, bool> evidence;
  for (const auto& o : obs) {
    const auto* g = std::get_if<GroundObservation>(&o);
    if (!g) continue;
    if (!g->prv.is_ground()) {
      throw ModelError("observation " + g->prv.to_string() + " is not ground");
    }
    if (g->prv.arity() >= 2) {
      throw ModelError("observation " + g->prv.to_string() +
                       " is on a predicate with two or more arguments; only unary and "
                       "nullary evidence is supported");
    }
    auto [it, inserted] = evidence.emplace(g->prv, g->value);
    if (!inserted && it->second != g->value) {
      throw ModelError("contradictory observations on " + g->prv.to_string());
    }
  }

  // population -> member -> (predicate -> value)
  std::map<std::string, std::map<std::string, std::map<std::string, bool>>> cells;
  for (const auto& [prv, value] : evidence) {
    if (prv.arity() == 0 || find_family(out, prv)) {
      out = condition_literal(out, prv, value);
      continue;
    }
    if (!predicate_present(out, prv.predicate)) continue;  // not a variable of the model
    // Only ground families of this predicate: the atom is not a variable.
    const bool lifted_family = std::any_of(out.prvs.begin(), out.prvs.end(), [&](const Prv& f) {
      return f.predicate == prv.predicate && !f.is_ground();
    });
    if (!lifted_family) continue;
    const std::string& c = prv.args[0].name;
    auto x = owner_of(out, c);
    if (!x || !find_family(out, Prv{prv.predicate, {Term::var(*x)}})) {
      throw ModelError("observed constant " + c + " is not in the population of " +
                       prv.predicate);
    }
    if (counted.count(*x)) {
      throw ModelError("cannot combine a count observation with ground evidence on " +
                       prv.to_string());
    }
    cells[*x][c][prv.predicate] = value;
  }

  for (const auto& [x, by_member] : cells) {
    std::set<std::string> preds;
    for (const auto& [c, obs_of] : by_member) {
      for (const auto& [p, v] : obs_of) preds.insert(p);
    }
    // Signature per member: 2 true, 1 false, 0 unobserved, per predicate.
    std::map<std::vector<int>, std::vector<std::string>, std::greater<>> groups;
    for (const auto& c : *out.population(x).members) {
      std::vector<int> sig;
      auto it = by_member.find(c);
      for (const auto& p : preds) {
        int s = 0;
        if (it != by_member.end()) {
          auto jt = it->second.find(p);
          if (jt != it->second.end()) s = jt->second ? 2 : 1;
        }
        sig.push_back(s);
      }
      groups[sig].push_back(c);
    }
    // Peel off one cell at a time; the last cell keeps the remainder.
    std::vector<std::pair<std::string, std::vector<int>>> cell_lvars;
    std::string rest = x;
    std::size_t k = 0;
    for (const auto& [sig, members] : groups) {
      if (++k == groups.size()) {
        cell_lvars.emplace_back(rest, sig);
        break;
      }
      move_to_front(out, rest, members);
      const std::int64_t n = out.population(rest).concrete_size();
      const auto part = static_cast<std::int64_t>(members.size());
      SplitResult r = split_population(out, rest, SizeExpr(part), SizeExpr(n - part));
      out = std::move(r.mln);
      cell_lvars.emplace_back(r.first, sig);
      rest = r.second;
    }
    for (const auto& [lv, sig] : cell_lvars) {
      std::size_t j = 0;
      for (const auto& p : preds) {
        if (sig[j] != 0) out = condition_family(out, Prv{p, {Term::var(lv)}}, sig[j] == 2);
        ++j;
      }
    }
  }

  out.drop_unused_populations();
  out.validate();
  return out;
}

}  // namespace liftc
