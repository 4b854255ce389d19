#include "liftc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "liftc/errors.hpp"

namespace liftc {

namespace {

using Binding = std::map<std::string, std::string>;

std::string render(const Prv& p, const Binding& b) {
  if (p.args.empty()) return p.predicate;
  std::string s = p.predicate + "(";
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    if (i) s += ",";
    const Term& t = p.args[i];
    s += t.is_var() ? b.at(t.name) : t.name;
  }
  return s + ")";
}

// Calls f(binding) for every assignment of members to `vars`.
void for_each_binding(const MLN& m, const std::vector<std::string>& vars,
                      const std::function<void(const Binding&)>& f) {
  std::vector<std::vector<std::string>> members;
  for (const auto& v : vars) {
    members.push_back(m.population(v).member_names());
    if (members.back().empty()) return;
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  Binding b;
  while (true) {
    for (std::size_t k = 0; k < vars.size(); ++k) b[vars[k]] = members[k][idx[k]];
    f(b);
    std::size_t k = 0;
    while (k < vars.size() && ++idx[k] == members[k].size()) idx[k++] = 0;
    if (k == vars.size()) return;
  }
}

std::vector<std::string> formula_vars(const WeightedFormula& wf) {
  auto s = wf.formula.lvars();
  return {s.begin(), s.end()};
}

std::int64_t extra_multiplicity(const MLN& m, const WeightedFormula& wf) {
  auto fv = wf.formula.lvars();
  std::int64_t mult = 1;
  for (const auto& v : wf.lvars) {
    if (!fv.count(v)) mult *= m.population(v).concrete_size();
  }
  return mult;
}

}  // namespace

World::World(std::vector<std::string> atoms, std::uint64_t bits)
    : atoms_(std::move(atoms)), bits_(bits) {
  if (atoms_.size() > 64) throw std::length_error("world has more than 64 atoms");
}

bool World::value(const std::string& atom) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it == atoms_.end() || *it != atom) throw std::out_of_range("no atom " + atom + " in world");
  return (bits_ >> (it - atoms_.begin())) & 1U;
}

void World::set(const std::string& atom, bool v) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it == atoms_.end() || *it != atom) throw std::out_of_range("no atom " + atom + " in world");
  const std::uint64_t bit = std::uint64_t{1} << (it - atoms_.begin());
  bits_ = v ? (bits_ | bit) : (bits_ & ~bit);
}

std::vector<std::string> ground_atoms(const MLN& m) {
  std::set<std::string> atoms;
  auto add = [&](const Prv& p) {
    for_each_binding(m, p.lvars(), [&](const Binding& b) { atoms.insert(render(p, b)); });
  };
  for (const auto& p : m.prvs) add(p);
  for (const auto& wf : m.wfs) {
    for (const auto& l : wf.formula.literals()) add(l.prv);
  }
  return {atoms.begin(), atoms.end()};
}

World make_world(const MLN& m, const std::vector<std::string>& true_atoms) {
  auto atoms = ground_atoms(m);
  if (atoms.size() > 64) throw std::length_error("model has more than 64 ground atoms");
  World w(std::move(atoms), 0);
  for (const auto& a : true_atoms) w.set(a, true);
  return w;
}

std::int64_t eta(const MLN& m, const WeightedFormula& wf, const World& w) {
  if (wf.formula.is_false()) return 0;
  std::int64_t count = 0;
  for_each_binding(m, formula_vars(wf), [&](const Binding& b) {
    for (const auto& l : wf.formula.literals()) {
      if (w.value(render(l.prv, b)) != l.positive) return;
    }
    ++count;
  });
  return count * extra_multiplicity(m, wf);
}

PartitionValue world_weight(const MLN& m, const World& w) {
  double lw = 0.0;
  for (const auto& wf : m.wfs) lw += static_cast<double>(eta(m, wf, w)) * wf.weight;
  return PartitionValue::linear(std::exp(lw));
}

PartitionValue ground_partition(const MLN& m, const OracleOptions& opts) {
  const std::vector<std::string> atoms = ground_atoms(m);
  std::map<std::string, std::size_t> index;
  for (const auto& [a, v] : opts.evidence) {
    if (!std::binary_search(atoms.begin(), atoms.end(), a)) {
      throw ModelError("evidence atom " + a + " is not a ground atom of the model");
    }
  }
  std::size_t free_count = 0;
  for (const auto& a : atoms) {
    if (!opts.evidence.count(a)) index[a] = free_count++;
  }
  if (free_count > 62 || (free_count > opts.bound && !opts.force)) {
    throw OracleLimitError(free_count, free_count > 62 ? 62 : opts.bound);
  }

  // One entry per grounding of a formula: it holds iff all `pos` bits are set
  // and no `neg` bit is set; it then adds `gain` to the log weight.
  struct Grounding {
    std::uint64_t pos;
    std::uint64_t neg;
    double gain;
  };
  std::vector<Grounding> groundings;
  double constant_gain = 0.0;
  for (const auto& wf : m.wfs) {
    if (wf.formula.is_false()) continue;
    const double mult = static_cast<double>(extra_multiplicity(m, wf));
    for_each_binding(m, formula_vars(wf), [&](const Binding& b) {
      Grounding g{0, 0, wf.weight * mult};
      for (const auto& l : wf.formula.literals()) {
        const std::string a = render(l.prv, b);
        if (auto ev = opts.evidence.find(a); ev != opts.evidence.end()) {
          if (ev->second != l.positive) return;  // never holds
          continue;
        }
        const std::uint64_t bit = std::uint64_t{1} << index.at(a);
        (l.positive ? g.pos : g.neg) |= bit;
      }
      if ((g.pos & g.neg) != 0) return;
      if (g.pos == 0 && g.neg == 0) {
        constant_gain += g.gain;
      } else {
        groundings.push_back(g);
      }
    });
  }

  long double z = 0.0L;
  const std::uint64_t worlds = std::uint64_t{1} << free_count;
  for (std::uint64_t w = 0; w < worlds; ++w) {
    double lw = constant_gain;
    for (const auto& g : groundings) {
      if ((w & g.pos) == g.pos && (w & g.neg) == 0) lw += g.gain;
    }
    z += std::exp(static_cast<long double>(lw));
  }
  return PartitionValue::linear(static_cast<double>(z));
}

}  // namespace liftc
