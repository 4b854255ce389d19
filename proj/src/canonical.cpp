#include "liftc/canonical.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

namespace liftc {

std::string canonical_population_name(std::size_t slot) { return "p" + std::to_string(slot); }
std::string canonical_size_symbol(std::size_t slot) { return "N" + std::to_string(slot); }

namespace {

constexpr std::size_t kMaxLabelings = 2048;

std::string hex_double(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", w);
  return buf;
}

struct IndexedLiteral {
  bool positive;
  std::string predicate;
  std::vector<int> args;
};

struct IndexedWf {
  std::string weight;
  int kind;  // 0 conj, 1 true, 2 false
  std::vector<int> lvars;
  std::vector<IndexedLiteral> lits;
};

struct IndexedPrv {
  std::string predicate;
  std::vector<int> args;
};

// Entities are populations [0, P) followed by constants [P, P + C).
struct Indexed {
  std::vector<std::string> names;
  std::size_t num_pops = 0;
  std::vector<IndexedWf> wfs;
  std::vector<IndexedPrv> prvs;
};

Indexed index_mln(const MLN& m) {
  Indexed ix;
  std::set<std::string> pops;
  std::set<std::string> consts;
  auto scan = [&](const Prv& p) {
    for (const auto& t : p.args) (t.is_var() ? pops : consts).insert(t.name);
  };
  for (const auto& wf : m.wfs) {
    pops.insert(wf.lvars.begin(), wf.lvars.end());
    for (const auto& l : wf.formula.literals()) scan(l.prv);
  }
  for (const auto& p : m.prvs) scan(p);
  std::map<std::string, int> pop_id;
  std::map<std::string, int> const_id;
  for (const auto& p : pops) {
    pop_id[p] = static_cast<int>(ix.names.size());
    ix.names.push_back(p);
  }
  ix.num_pops = ix.names.size();
  for (const auto& c : consts) {
    const_id[c] = static_cast<int>(ix.names.size());
    ix.names.push_back(c);
  }
  auto term_id = [&](const Term& t) { return t.is_var() ? pop_id.at(t.name) : const_id.at(t.name); };
  for (const auto& wf : m.wfs) {
    IndexedWf iw;
    iw.weight = hex_double(wf.weight);
    iw.kind = wf.formula.is_true() ? 1 : wf.formula.is_false() ? 2 : 0;
    for (const auto& v : wf.lvars) iw.lvars.push_back(pop_id.at(v));
    for (const auto& l : wf.formula.literals()) {
      IndexedLiteral il{l.positive, l.prv.predicate, {}};
      for (const auto& t : l.prv.args) il.args.push_back(term_id(t));
      iw.lits.push_back(std::move(il));
    }
    ix.wfs.push_back(std::move(iw));
  }
  for (const auto& p : m.prvs) {
    IndexedPrv ip{p.predicate, {}};
    for (const auto& t : p.args) ip.args.push_back(term_id(t));
    ix.prvs.push_back(std::move(ip));
  }
  return ix;
}

template <typename Label>
std::string ser_args(const std::vector<int>& args, const Label& label) {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += label(args[i]);
  }
  return s + ")";
}

template <typename Label>
std::string ser_wf(const IndexedWf& wf, const Label& label) {
  std::vector<std::string> l;
  for (int v : wf.lvars) l.push_back(label(v));
  std::sort(l.begin(), l.end());
  std::string s = wf.weight + "{";
  for (const auto& x : l) s += x + ",";
  s += "}";
  if (wf.kind == 1) return s + "T";
  if (wf.kind == 2) return s + "F";
  std::vector<std::string> lits;
  for (const auto& lit : wf.lits) {
    lits.push_back((lit.positive ? "+" : "-") + lit.predicate + ser_args(lit.args, label));
  }
  std::sort(lits.begin(), lits.end());
  for (const auto& x : lits) s += x + "&";
  return s;
}

template <typename Label>
std::string ser_prv(const IndexedPrv& p, const Label& label) {
  return p.predicate + ser_args(p.args, label);
}

bool wf_touches(const IndexedWf& wf, int e) {
  if (std::find(wf.lvars.begin(), wf.lvars.end(), e) != wf.lvars.end()) return true;
  for (const auto& l : wf.lits) {
    if (std::find(l.args.begin(), l.args.end(), e) != l.args.end()) return true;
  }
  return false;
}

// Color refinement over entities; colors are ranks of name-free signatures.
std::vector<int> refine(const Indexed& ix) {
  const std::size_t n = ix.names.size();
  std::vector<int> color(n);
  for (std::size_t e = 0; e < n; ++e) color[e] = e < ix.num_pops ? 0 : 1;
  std::size_t num_colors = std::min<std::size_t>(n, (ix.num_pops > 0) + (n > ix.num_pops));
  for (std::size_t round = 0; round <= n; ++round) {
    std::vector<std::string> sig(n);
    for (std::size_t e = 0; e < n; ++e) {
      const int me = static_cast<int>(e);
      auto label = [&](int x) {
        return x == me ? std::string("*") : "#" + std::to_string(color[static_cast<std::size_t>(x)]);
      };
      std::vector<std::string> occ;
      for (const auto& wf : ix.wfs) {
        if (wf_touches(wf, me)) occ.push_back("W" + ser_wf(wf, label));
      }
      for (const auto& p : ix.prvs) {
        if (std::find(p.args.begin(), p.args.end(), me) != p.args.end()) {
          occ.push_back("V" + ser_prv(p, label));
        }
      }
      std::sort(occ.begin(), occ.end());
      sig[e] = std::to_string(color[e]) + "|";
      for (const auto& o : occ) sig[e] += o + ";";
    }
    std::vector<std::string> distinct = sig;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t e = 0; e < n; ++e) {
      color[e] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sig[e]) -
                                  distinct.begin());
    }
    if (distinct.size() == num_colors) break;
    num_colors = distinct.size();
  }
  return color;
}

struct Labeled {
  std::string structure;
  std::string sizes;
  std::vector<int> slot;  // entity -> label index within its kind
};

}  // namespace

CanonicalForm canonical_form(const MLN& m) {
  const Indexed ix = index_mln(m);
  const std::size_t n = ix.names.size();
  const std::vector<int> color = refine(ix);

  // Classes of equal color, ordered by color; populations and constants
  // never share a color.
  std::map<int, std::vector<int>> classes;
  for (std::size_t e = 0; e < n; ++e) classes[color[e]].push_back(static_cast<int>(e));
  std::vector<std::vector<int>> groups;
  std::size_t labelings = 1;
  for (auto& [c, members] : classes) {
    for (std::size_t k = 2; k <= members.size() && labelings <= kMaxLabelings; ++k) labelings *= k;
    groups.push_back(members);
  }
  const bool exhaustive = labelings <= kMaxLabelings;

  auto sizes_of = [&](const std::vector<int>& slot) {
    std::vector<std::string> by_slot(ix.num_pops);
    for (std::size_t e = 0; e < ix.num_pops; ++e) {
      by_slot[static_cast<std::size_t>(slot[e])] = m.population(ix.names[e]).size.to_string();
    }
    std::string s;
    for (const auto& x : by_slot) s += x + ";";
    return s;
  };

  auto labeled = [&](const std::vector<std::vector<int>>& order) {
    Labeled out;
    out.slot.assign(n, 0);
    int next_pop = 0;
    int next_const = 0;
    for (const auto& g : order) {
      for (int e : g) {
        out.slot[static_cast<std::size_t>(e)] =
            static_cast<std::size_t>(e) < ix.num_pops ? next_pop++ : next_const++;
      }
    }
    auto label = [&](int e) {
      auto ue = static_cast<std::size_t>(e);
      return (ue < ix.num_pops ? canonical_population_name(static_cast<std::size_t>(out.slot[ue]))
                               : "C" + std::to_string(out.slot[ue]));
    };
    std::vector<std::string> wfs;
    for (const auto& wf : ix.wfs) wfs.push_back(ser_wf(wf, label));
    std::sort(wfs.begin(), wfs.end());
    std::vector<std::string> prvs;
    for (const auto& p : ix.prvs) prvs.push_back(ser_prv(p, label));
    std::sort(prvs.begin(), prvs.end());
    prvs.erase(std::unique(prvs.begin(), prvs.end()), prvs.end());
    out.structure = "P" + std::to_string(ix.num_pops) + "|W";
    for (const auto& w : wfs) out.structure += w + "|";
    out.structure += "V";
    for (const auto& p : prvs) out.structure += p + "|";
    out.sizes = sizes_of(out.slot);
    return out;
  };

  Labeled best;
  bool have_best = false;
  if (exhaustive) {
    std::vector<std::vector<int>> order = groups;
    for (auto& g : order) std::sort(g.begin(), g.end());
    // Odometer over the permutations of every class.
    while (true) {
      Labeled cand = labeled(order);
      if (!have_best || std::tie(cand.structure, cand.sizes) < std::tie(best.structure, best.sizes)) {
        best = std::move(cand);
        have_best = true;
      }
      std::size_t g = 0;
      while (g < order.size() && !std::next_permutation(order[g].begin(), order[g].end())) ++g;
      if (g == order.size()) break;
    }
  } else {
    // Too symmetric to search: fall back to color then input-name order.
    // Keys stay sound; only cache hit rate can suffer.
    best = labeled(groups);
  }

  CanonicalForm out;
  out.structure = std::move(best.structure);
  out.sizes.resize(ix.num_pops);
  std::vector<std::string> new_name(n);
  for (std::size_t e = 0; e < n; ++e) {
    auto s = static_cast<std::size_t>(best.slot[e]);
    if (e < ix.num_pops) {
      new_name[e] = canonical_population_name(s);
      out.sizes[s] = m.population(ix.names[e]).size;
    } else {
      new_name[e] = "C" + std::to_string(s);
    }
  }
  MLN& r = out.mln;
  for (std::size_t s = 0; s < ix.num_pops; ++s) {
    r.add_population(Population(canonical_population_name(s),
                                SizeExpr::symbol(canonical_size_symbol(s))));
  }
  auto rename_prv = [&](const std::string& pred, const std::vector<int>& args) {
    Prv p{pred, {}};
    for (int a : args) {
      auto ua = static_cast<std::size_t>(a);
      p.args.push_back(ua < ix.num_pops ? Term::var(new_name[ua]) : Term::constant(new_name[ua]));
    }
    return p;
  };
  std::vector<std::pair<std::string, WeightedFormula>> keyed;
  auto final_label = [&](int e) { return new_name[static_cast<std::size_t>(e)]; };
  for (std::size_t i = 0; i < ix.wfs.size(); ++i) {
    const auto& iw = ix.wfs[i];
    std::vector<std::string> l;
    for (int v : iw.lvars) l.push_back(new_name[static_cast<std::size_t>(v)]);
    Formula f = iw.kind == 1   ? Formula::truth()
                : iw.kind == 2 ? Formula::falsity()
                               : Formula();
    if (iw.kind == 0) {
      std::vector<Literal> lits;
      for (const auto& il : iw.lits) lits.push_back({rename_prv(il.predicate, il.args), il.positive});
      f = Formula::conjunction(std::move(lits));
    }
    keyed.emplace_back(ser_wf(iw, final_label), WeightedFormula(std::move(l), std::move(f), m.wfs[i].weight));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [k, wf] : keyed) r.wfs.push_back(std::move(wf));
  for (const auto& ip : ix.prvs) r.prvs.push_back(rename_prv(ip.predicate, ip.args));
  std::sort(r.prvs.begin(), r.prvs.end());
  r.prvs.erase(std::unique(r.prvs.begin(), r.prvs.end()), r.prvs.end());
  return out;
}

CanonicalKey canonicalize(const MLN& m) {
  CanonicalForm f = canonical_form(m);
  std::string bytes = std::move(f.structure);
  bytes += "#sizes:";
  for (const auto& s : f.sizes) bytes += s.to_string() + ";";
  return {std::move(bytes)};
}

}  // namespace liftc
