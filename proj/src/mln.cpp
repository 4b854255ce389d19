#include "liftc/mln.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "liftc/errors.hpp"

namespace liftc {

bool Prv::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_var(); });
}

std::vector<std::string> Prv::lvars() const {
  std::vector<std::string> out;
  for (const auto& t : args) {
    if (t.is_var() && std::find(out.begin(), out.end(), t.name) == out.end()) {
      out.push_back(t.name);
    }
  }
  return out;
}

bool Prv::mentions(const std::string& lvar) const {
  return std::any_of(args.begin(), args.end(),
                     [&](const Term& t) { return t.is_var() && t.name == lvar; });
}

std::string Prv::to_string() const {
  if (args.empty()) return predicate;
  std::string s = predicate + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i].name;
  }
  return s + ")";
}

std::string Literal::to_string() const {
  return (positive ? "" : "!") + prv.to_string();
}

Formula Formula::conjunction(std::vector<Literal> literals) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  if (literals.empty()) return truth();
  for (std::size_t i = 1; i < literals.size(); ++i) {
    // Complementary literals are adjacent: same PRV, false sorts first.
    if (literals[i].prv == literals[i - 1].prv) return falsity();
  }
  Formula f(Kind::Conjunction);
  f.literals_ = std::move(literals);
  return f;
}

std::set<std::string> Formula::lvars() const {
  std::set<std::string> out;
  for (const auto& l : literals_) {
    for (const auto& t : l.prv.args) {
      if (t.is_var()) out.insert(t.name);
    }
  }
  return out;
}

std::string Formula::to_string() const {
  switch (kind_) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Conjunction:
      break;
  }
  std::string s;
  for (std::size_t i = 0; i < literals_.size(); ++i) {
    if (i) s += " & ";
    s += literals_[i].to_string();
  }
  return s;
}

WeightedFormula::WeightedFormula(std::vector<std::string> l, Formula f, double w)
    : lvars(std::move(l)), formula(std::move(f)), weight(w) {
  std::sort(lvars.begin(), lvars.end());
  lvars.erase(std::unique(lvars.begin(), lvars.end()), lvars.end());
}

std::string WeightedFormula::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "<{";
  for (std::size_t i = 0; i < lvars.size(); ++i) os << (i ? "," : "") << lvars[i];
  os << "}, " << formula.to_string() << ", " << weight << ">";
  return os.str();
}

Population::Population(std::string n, SizeExpr s,
                       std::optional<std::vector<std::string>> m)
    : name(std::move(n)), size(std::move(s)), members(std::move(m)) {
  if (auto c = size.constant(); c && *c < 0) {
    throw ModelError("population '" + name + "' has negative size");
  }
  if (members) {
    auto c = size.constant();
    if (!c || static_cast<std::size_t>(*c) != members->size()) {
      throw ModelError("population '" + name + "' member list does not match its size");
    }
    std::vector<std::string> sorted = *members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ModelError("population '" + name + "' lists a member twice");
    }
  }
}

std::int64_t Population::concrete_size() const {
  auto c = size.constant();
  if (!c) throw ModelError("population '" + name + "' has symbolic size " + size.to_string());
  return *c;
}

std::vector<std::string> Population::member_names() const {
  if (members) return *members;
  return synthesize_members(name, concrete_size());
}

std::vector<std::string> synthesize_members(const std::string& population,
                                            std::int64_t size) {
  std::string stem = population;
  if (!stem.empty()) stem[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(stem[0])));
  if (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem += "_";
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(size));
  for (std::int64_t i = 1; i <= size; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

MLN MLN::from_formulas(std::vector<Population> pops, std::vector<WeightedFormula> wfs) {
  MLN m;
  for (auto& p : pops) m.add_population(std::move(p));
  m.wfs = std::move(wfs);
  m.sync_prvs();
  return m;
}

void MLN::add_population(Population p) {
  std::string key = p.name;
  populations.insert_or_assign(std::move(key), std::move(p));
}

const Population& MLN::population(const std::string& lvar) const {
  auto it = populations.find(lvar);
  if (it == populations.end()) throw ModelError("unknown logical variable '" + lvar + "'");
  return it->second;
}

bool MLN::has_prv(const Prv& p) const {
  return std::find(prvs.begin(), prvs.end(), p) != prvs.end();
}

void MLN::sync_prvs() {
  for (const auto& wf : wfs) {
    for (const auto& l : wf.formula.literals()) prvs.push_back(l.prv);
  }
  std::sort(prvs.begin(), prvs.end());
  prvs.erase(std::unique(prvs.begin(), prvs.end()), prvs.end());
}

void MLN::drop_unused_populations() {
  std::set<std::string> used;
  for (const auto& wf : wfs) used.insert(wf.lvars.begin(), wf.lvars.end());
  for (const auto& p : prvs) {
    for (const auto& v : p.lvars()) used.insert(v);
  }
  std::erase_if(populations, [&](const auto& kv) { return !used.count(kv.first); });
}

std::set<std::string> MLN::predicates() const {
  std::set<std::string> out;
  for (const auto& p : prvs) out.insert(p.predicate);
  for (const auto& wf : wfs) {
    for (const auto& l : wf.formula.literals()) out.insert(l.prv.predicate);
  }
  return out;
}

std::set<std::string> MLN::constants() const {
  std::set<std::string> out;
  auto scan = [&](const Prv& p) {
    for (const auto& t : p.args) {
      if (!t.is_var()) out.insert(t.name);
    }
  };
  for (const auto& p : prvs) scan(p);
  for (const auto& wf : wfs) {
    for (const auto& l : wf.formula.literals()) scan(l.prv);
  }
  return out;
}

bool MLN::all_sizes_constant() const {
  return std::all_of(populations.begin(), populations.end(),
                     [](const auto& kv) { return kv.second.size.is_constant(); });
}

void MLN::validate() const {
  std::map<std::string, std::size_t> arity;
  auto check_prv = [&](const Prv& p) {
    auto [it, inserted] = arity.try_emplace(p.predicate, p.arity());
    if (!inserted && it->second != p.arity()) {
      throw ModelError("predicate '" + p.predicate + "' used with arities " +
                       std::to_string(it->second) + " and " + std::to_string(p.arity()));
    }
    for (const auto& v : p.lvars()) {
      if (!populations.count(v)) throw ModelError("logical variable '" + v + "' has no population");
    }
  };
  for (const auto& p : prvs) check_prv(p);
  for (const auto& wf : wfs) {
    for (const auto& v : wf.lvars) {
      if (!populations.count(v)) throw ModelError("logical variable '" + v + "' has no population");
    }
    for (const auto& l : wf.formula.literals()) {
      check_prv(l.prv);
      if (!has_prv(l.prv)) {
        throw ModelError("literal " + l.to_string() + " is not a declared PRV family");
      }
    }
    for (const auto& v : wf.formula.lvars()) {
      if (!std::binary_search(wf.lvars.begin(), wf.lvars.end(), v)) {
        throw ModelError("formula variable '" + v + "' missing from L in " + wf.to_string());
      }
    }
  }
}

std::string MLN::to_string() const {
  std::ostringstream os;
  for (const auto& [name, p] : populations) {
    os << "population " << name << " " << p.size.to_string() << "\n";
  }
  for (const auto& wf : wfs) os << wf.to_string() << "\n";
  os << "prvs:";
  for (const auto& p : prvs) os << " " << p.to_string();
  os << "\n";
  return os.str();
}

SizeExpr ground_variable_count(const MLN& m) {
  SizeExpr total;
  for (const auto& p : m.prvs) {
    SizeExpr prod(1);
    for (const auto& v : p.lvars()) prod = prod * m.population(v).size;
    total = total + prod;
  }
  return total;
}

std::string fresh_lvar_name(const MLN& m, const std::string& base) {
  std::set<std::string> taken;
  for (const auto& [n, p] : m.populations) taken.insert(n);
  for (const auto& wf : m.wfs) taken.insert(wf.lvars.begin(), wf.lvars.end());
  if (!taken.count(base)) return base;
  for (int i = 2;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

std::string fresh_constant_name(const MLN& m, const std::string& base) {
  std::set<std::string> taken = m.constants();
  for (const auto& [n, p] : m.populations) {
    if (p.members) taken.insert(p.members->begin(), p.members->end());
  }
  if (!taken.count(base)) return base;
  for (int i = 2;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

MLN condition_family(const MLN& m, const Prv& family, bool value) {
  MLN out;
  out.populations = m.populations;
  for (const auto& p : m.prvs) {
    if (p != family) out.prvs.push_back(p);
  }
  for (const auto& wf : m.wfs) {
    if (wf.formula.kind() != Formula::Kind::Conjunction) {
      out.wfs.push_back(wf);
      continue;
    }
    bool falsified = false;
    std::vector<Literal> kept;
    for (const auto& l : wf.formula.literals()) {
      if (l.prv == family) {
        if (l.positive != value) falsified = true;
      } else {
        kept.push_back(l);
      }
    }
    Formula f = falsified ? Formula::falsity() : Formula::conjunction(std::move(kept));
    out.wfs.emplace_back(wf.lvars, std::move(f), wf.weight);
  }
  return out;
}

MLN condition_literal(const MLN& m, const Prv& prv, bool value) {
  if (!prv.is_ground()) {
    throw ModelError("cannot condition on " + prv.to_string() +
                     ": it contains a logical variable");
  }
  return condition_family(m, prv, value);
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<MLN> connected_components(const MLN& m) {
  const std::size_t nwf = m.wfs.size();
  const std::size_t nprv = m.prvs.size();
  // Nodes: formulas first, then families.
  DisjointSets ds(nwf + nprv);
  for (std::size_t i = 0; i < nwf; ++i) {
    for (const auto& l : m.wfs[i].formula.literals()) {
      auto it = std::find(m.prvs.begin(), m.prvs.end(), l.prv);
      if (it != m.prvs.end()) {
        ds.unite(i, nwf + static_cast<std::size_t>(it - m.prvs.begin()));
      }
    }
  }
  std::map<std::size_t, std::size_t> root_to_component;
  std::vector<MLN> comps;
  // Families no formula mentions share one trailing component.
  std::vector<Prv> loose;
  auto component_for = [&](std::size_t node) -> MLN& {
    auto [it, inserted] = root_to_component.try_emplace(ds.find(node), comps.size());
    if (inserted) comps.emplace_back();
    return comps[it->second];
  };
  for (std::size_t i = 0; i < nwf; ++i) component_for(i).wfs.push_back(m.wfs[i]);
  for (std::size_t j = 0; j < nprv; ++j) {
    std::size_t root = ds.find(nwf + j);
    if (root >= nwf) {
      loose.push_back(m.prvs[j]);
    } else {
      component_for(nwf + j).prvs.push_back(m.prvs[j]);
    }
  }
  if (!loose.empty()) {
    MLN rest;
    rest.prvs = std::move(loose);
    comps.push_back(std::move(rest));
  }
  for (auto& c : comps) {
    c.populations = m.populations;
    c.drop_unused_populations();
  }
  return comps;
}

namespace {

Prv rename_in(const Prv& p, const std::string& from, const Term& to) {
  Prv out = p;
  for (auto& t : out.args) {
    if (t.is_var() && t.name == from) t = to;
  }
  return out;
}

WeightedFormula rename_in(const WeightedFormula& wf, const std::string& from, const Term& to) {
  std::vector<std::string> lvars;
  for (const auto& v : wf.lvars) {
    if (v != from) {
      lvars.push_back(v);
    } else if (to.is_var()) {
      lvars.push_back(to.name);
    }
  }
  if (wf.formula.kind() != Formula::Kind::Conjunction) {
    return {std::move(lvars), wf.formula, wf.weight};
  }
  std::vector<Literal> lits;
  for (const auto& l : wf.formula.literals()) lits.push_back({rename_in(l.prv, from, to), l.positive});
  return {std::move(lvars), Formula::conjunction(std::move(lits)), wf.weight};
}

bool wf_mentions(const WeightedFormula& wf, const std::string& x) {
  return std::binary_search(wf.lvars.begin(), wf.lvars.end(), x);
}

}  // namespace

SplitResult split_population(const MLN& m, const std::string& x, const SizeExpr& n1,
                             const SizeExpr& n2) {
  const Population& pop = m.population(x);
  SplitResult r;
  r.first = fresh_lvar_name(m, x + "1");
  MLN probe = m;
  probe.populations.emplace(r.first, Population(r.first, 0));
  r.second = fresh_lvar_name(probe, x + "2");

  std::optional<std::vector<std::string>> m1, m2;
  if (pop.members) {
    auto c1 = n1.constant();
    auto c2 = n2.constant();
    if (c1 && c2 && *c1 >= 0 && *c2 >= 0 &&
        static_cast<std::size_t>(*c1 + *c2) == pop.members->size()) {
      m1.emplace(pop.members->begin(), pop.members->begin() + *c1);
      m2.emplace(pop.members->begin() + *c1, pop.members->end());
    }
  }
  MLN& out = r.mln;
  out.populations = m.populations;
  out.populations.erase(x);
  out.add_population(Population(r.first, n1, std::move(m1)));
  out.add_population(Population(r.second, n2, std::move(m2)));
  const Term t1 = Term::var(r.first);
  const Term t2 = Term::var(r.second);
  for (const auto& wf : m.wfs) {
    if (wf_mentions(wf, x)) {
      out.wfs.push_back(rename_in(wf, x, t1));
      out.wfs.push_back(rename_in(wf, x, t2));
    } else {
      out.wfs.push_back(wf);
    }
  }
  for (const auto& p : m.prvs) {
    if (p.mentions(x)) {
      out.prvs.push_back(rename_in(p, x, t1));
      out.prvs.push_back(rename_in(p, x, t2));
    } else {
      out.prvs.push_back(p);
    }
  }
  std::sort(out.prvs.begin(), out.prvs.end());
  return r;
}

MLN split_population(const MLN& m, const std::string& x, std::int64_t n1, std::int64_t n2) {
  std::int64_t size = m.population(x).concrete_size();
  if (n1 < 0 || n2 < 0 || n1 + n2 != size) {
    throw ModelError("split sizes " + std::to_string(n1) + "+" + std::to_string(n2) +
                     " do not sum to |" + x + "|=" + std::to_string(size));
  }
  return split_population(m, x, SizeExpr(n1), SizeExpr(n2)).mln;
}

MLN substitute_lvar(const MLN& m, const std::string& x, const std::string& c) {
  const Term to = Term::constant(c);
  MLN out;
  out.populations = m.populations;
  out.populations.erase(x);
  for (const auto& wf : m.wfs) out.wfs.push_back(rename_in(wf, x, to));
  for (const auto& p : m.prvs) out.prvs.push_back(rename_in(p, x, to));
  std::sort(out.prvs.begin(), out.prvs.end());
  out.prvs.erase(std::unique(out.prvs.begin(), out.prvs.end()), out.prvs.end());
  return out;
}

MLN substitute_sizes(const MLN& m, const std::map<std::string, SizeExpr>& env) {
  MLN out = m;
  for (auto& [name, p] : out.populations) {
    SizeExpr s = p.size.substitute(env);
    p = Population(name, s, s.is_constant() ? p.members : std::nullopt);
  }
  return out;
}

}  // namespace liftc
