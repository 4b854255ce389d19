#include "liftc/heuristics.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <tuple>

#include "liftc/canonical.hpp"

namespace liftc {

CaseAnalysisOrder greedy_order(const MLN& m) {
  struct Score {
    std::size_t lvars = 0;
    std::size_t occurrences = 0;
  };
  std::map<std::string, Score> score;
  for (const auto& p : m.predicates()) score[p];
  for (const auto& f : m.prvs) {
    auto& s = score[f.predicate];
    s.lvars = std::max(s.lvars, f.lvars().size());
  }
  for (const auto& wf : m.wfs) {
    for (const auto& lit : wf.formula.literals()) {
      auto& s = score[lit.prv.predicate];
      s.lvars = std::max(s.lvars, lit.prv.lvars().size());
      ++s.occurrences;
    }
  }
  CaseAnalysisOrder out;
  for (const auto& [name, s] : score) out.push_back(name);
  std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    const Score& x = score.at(a);
    const Score& y = score.at(b);
    return std::tie(x.lvars, x.occurrences, a) < std::tie(y.lvars, y.occurrences, b);
  });
  return out;
}

namespace {

using Known = std::vector<std::optional<std::int64_t>>;

class DepthSimulator {
 public:
  DepthSimulator(Planner& planner, std::int64_t max_size) : pl_(planner), max_size_(max_size) {}

  std::size_t depth(int sid, const Known& sizes) {
    auto key = std::make_pair(sid, sizes);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::size_t d = compute(sid, sizes);
    memo_.emplace(std::move(key), d);
    return d;
  }

 private:
  static std::optional<std::int64_t> eval(const SizeExpr& e,
                                          const std::map<std::string, std::int64_t>& env) {
    for (const auto& s : e.symbols()) {
      if (!env.count(s)) return std::nullopt;
    }
    return e.evaluate(env);
  }

  static Known eval_all(const std::vector<SizeExpr>& args,
                        const std::map<std::string, std::int64_t>& env) {
    Known out;
    for (const auto& a : args) out.push_back(eval(a, env));
    return out;
  }

  std::size_t compute(int sid, const Known& sizes) {
    const Plan p = pl_.plan(sid);
    std::map<std::string, std::int64_t> env;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (sizes[k]) env[canonical_size_symbol(k)] = *sizes[k];
    }
    std::size_t d = 0;
    switch (p.kind) {
      case PlanKind::TrueEval: return 0;
      case PlanKind::GroundLVar: {
        if (auto v = eval(p.amount, env)) {
          const PlanChild g = pl_.ground_child(sid, *v);
          return depth(g.sid, eval_all(g.args, env));
        }
        for (std::int64_t v = 0; v <= max_size_; ++v) {
          const PlanChild g = pl_.ground_child(sid, v);
          auto benv = env;
          benv[canonical_size_symbol(p.grounded_slot)] = v;
          d = std::max(d, depth(g.sid, eval_all(g.args, benv)));
        }
        return d;
      }
      default: break;
    }
    for (const auto& c : p.children) d = std::max(d, depth(c.sid, eval_all(c.args, env)));
    return p.kind == PlanKind::LiftedCase ? d + 1 : d;
  }

  Planner& pl_;
  std::int64_t max_size_;
  std::map<std::pair<int, Known>, std::size_t> memo_;
};

}  // namespace

std::size_t nesting_depth(const MLN& m, const CaseAnalysisOrder& o) {
  Planner planner(o);
  std::int64_t max_size = 0;
  for (const auto& [name, p] : m.populations) max_size = std::max(max_size, p.concrete_size());
  auto [sid, sizes] = planner.intern(m);
  Known known;
  for (const auto& s : sizes) known.push_back(s.constant());
  return DepthSimulator(planner, max_size).depth(sid, known);
}

CaseAnalysisOrder min_nested_loops(const MLN& m, const CaseAnalysisOrder& init, std::size_t budget,
                                   std::uint64_t seed) {
  CaseAnalysisOrder best = init;
  if (budget == 0 || init.size() < 2) return best;
  std::size_t best_depth = nesting_depth(m, best);
  std::mt19937_64 rng(seed);
  const std::size_t n = init.size();
  for (std::size_t it = 0; it < budget; ++it) {
    CaseAnalysisOrder cand = best;
    if (rng() & 1) {
      std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
      std::swap(cand[j], cand[j + 1]);
    } else {
      std::size_t a = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      std::size_t b = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
      if (b >= a) ++b;
      std::swap(cand[a], cand[b]);
    }
    const std::size_t d = nesting_depth(m, cand);
    if (d <= best_depth) {
      best = std::move(cand);
      best_depth = d;
    }
  }
  return best;
}

OrderSpec OrderSpec::parse(const std::string& text) {
  OrderSpec spec;
  if (text == "greedy") {
    spec.kind = Kind::Greedy;
  } else if (text == "minloops") {
    spec.kind = Kind::MinLoops;
  } else {
    spec.kind = Kind::Explicit;
    std::string cur;
    for (char c : text + ",") {
      if (c == ',') {
        if (cur.empty()) throw std::invalid_argument("empty predicate name in order '" + text + "'");
        spec.explicit_order.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur += c;
      }
    }
  }
  return spec;
}

CaseAnalysisOrder select_order(const MLN& m, const OrderSpec& spec) {
  switch (spec.kind) {
    case OrderSpec::Kind::Greedy: return greedy_order(m);
    case OrderSpec::Kind::MinLoops: return min_nested_loops(m, greedy_order(m), spec.budget, spec.seed);
    case OrderSpec::Kind::Explicit: return spec.explicit_order;
  }
  return spec.explicit_order;
}

}  // namespace liftc
