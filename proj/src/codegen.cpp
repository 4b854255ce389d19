#include "liftc/codegen.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "liftc/canonical.hpp"
#include "liftc/errors.hpp"

namespace liftc {

namespace {

using ir::Stmt;

class Compiler {
 public:
  Compiler(Planner& planner, std::int64_t max_size) : pl_(planner), max_size_(max_size) {}

  ir::Program run(int sid, const std::vector<SizeExpr>& sizes) {
    note_edge(sid);
    ir::Program p;
    p.max_size = max_size_;
    p.result = new_var();
    gen(sid, sizes, p.result, p.body, {});
    p.subroutines = std::move(subs_);
    return p;
  }

  std::size_t subroutine_count() const { return sub_names_.size(); }

 private:
  struct Info {
    int reach = 0;
    bool visited = false;
    bool finished = false;
    bool loop = false;
    bool ground = false;
  };

  std::string new_var() { return "v" + std::to_string(next_var_++); }
  std::string new_index() { return "i" + std::to_string(next_index_++); }

  // Count one more structural reference to sid and analyse its subtree.
  void note_edge(int sid) {
    Info& in = info_[sid];
    in.reach = std::min(in.reach + 1, 2);
    if (!in.visited) analyse(sid);
  }

  // Post-order pass computing loop/ground flags. Children of grounding
  // nodes are analysed lazily when their concrete sizes are known.
  void analyse(int sid) {
    info_[sid].visited = true;
    const Plan& p = pl_.plan(sid);
    bool loop = p.kind == PlanKind::LiftedCase;
    bool ground = p.kind == PlanKind::GroundLVar;
    for (const auto& c : p.children) {
      note_edge(c.sid);
      const Info& ci = info_[c.sid];
      if (!ci.finished) throw std::logic_error("cyclic plan at shape " + pl_.structure(sid));
      loop = loop || ci.loop;
      ground = ground || ci.ground;
    }
    Info& in = info_[sid];
    in.loop = loop;
    in.ground = ground;
    in.finished = true;
  }

  enum class Decision { Inline, Shared, Hoist };

  // Shared: reached from several places. Hoist: contains a loop and sits
  // in a scope with an index it ignores, so a memo table avoids recomputing
  // it on every iteration.
  Decision decide(int sid, const std::vector<SizeExpr>& args,
                  const std::vector<std::string>& enclosing) {
    if (sub_names_.count(sid)) return Decision::Shared;
    const Plan& p = pl_.plan(sid);
    const Info& in = info_.at(sid);
    if (p.kind == PlanKind::TrueEval || in.ground) return Decision::Inline;
    if (!ir::memo_key_fits(pl_.num_slots(sid), max_size_)) return Decision::Inline;
    if (in.reach >= 2) return Decision::Shared;
    if (!in.loop) return Decision::Inline;
    const bool ignores = std::any_of(enclosing.begin(), enclosing.end(), [&](const std::string& idx) {
      return std::none_of(args.begin(), args.end(),
                          [&](const SizeExpr& a) { return a.mentions(idx); });
    });
    return ignores ? Decision::Hoist : Decision::Inline;
  }

  const std::string& subroutine_for(int sid) {
    if (auto it = sub_names_.find(sid); it != sub_names_.end()) return it->second;
    const std::string name = "sub" + std::to_string(sub_names_.size() + 1);
    sub_names_.emplace(sid, name);
    ir::Subroutine s;
    s.name = name;
    std::vector<SizeExpr> params;
    for (std::size_t k = 0; k < pl_.num_slots(sid); ++k) {
      s.params.push_back("n" + std::to_string(k));
      params.push_back(SizeExpr::symbol(s.params.back()));
    }
    s.result = new_var();
    // Parameters act like enclosing indices: a loop that ignores one of
    // them is shared across calls.
    gen_body(sid, params, s.result, s.body, s.params);
    subs_.push_back(std::move(s));
    return sub_names_.at(sid);
  }

  static bool has_call(const ir::ExprPtr& e) {
    if (e->kind == ir::ExprKind::Call) return true;
    return std::any_of(e->args.begin(), e->args.end(), has_call);
  }

  // True when the statements run a loop or call a subroutine.
  static bool nontrivial(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      if (s.kind == ir::StmtKind::Loop || nontrivial(s.body)) return true;
      if (s.expr && has_call(s.expr)) return true;
      for (const auto& c : s.cases) {
        if (nontrivial(c.body) || has_call(c.result)) return true;
      }
    }
    return false;
  }

  void gen(int sid, const std::vector<SizeExpr>& args, const std::string& target,
           std::vector<Stmt>& out, const std::vector<std::string>& enclosing) {
    const Decision d = decide(sid, args, enclosing);
    if (d == Decision::Inline) {
      gen_body(sid, args, target, out, enclosing);
      return;
    }
    if (d == Decision::Hoist) {
      // Hoisting only pays off if the inline code does real work.
      const int saved_var = next_var_;
      const int saved_index = next_index_;
      const auto saved_names = sub_names_;
      const std::size_t saved_subs = subs_.size();
      std::vector<Stmt> trial;
      gen_body(sid, args, target, trial, enclosing);
      if (!nontrivial(trial)) {
        for (auto& s : trial) out.push_back(std::move(s));
        return;
      }
      next_var_ = saved_var;
      next_index_ = saved_index;
      sub_names_ = saved_names;
      subs_.resize(saved_subs);
    }
    const std::string name = subroutine_for(sid);
    out.push_back(Stmt::assign(target, ir::call(name, args)));
  }

  static std::vector<SizeExpr> bind(const std::vector<SizeExpr>& child_args,
                                    const std::map<std::string, SizeExpr>& env) {
    std::vector<SizeExpr> out;
    out.reserve(child_args.size());
    for (const auto& a : child_args) out.push_back(a.substitute(env));
    return out;
  }

  static ir::ExprPtr product(const std::vector<ir::ExprPtr>& factors) {
    if (factors.empty()) return ir::constant(1.0);
    ir::ExprPtr e = factors[0];
    for (std::size_t k = 1; k < factors.size(); ++k) e = ir::mul(e, factors[k]);
    return e;
  }

  void gen_body(int sid, const std::vector<SizeExpr>& args, const std::string& target,
                std::vector<Stmt>& out, const std::vector<std::string>& enclosing) {
    const Plan p = pl_.plan(sid);  // copy: planning may grow the planner
    std::map<std::string, SizeExpr> env;
    for (std::size_t k = 0; k < args.size(); ++k) env[canonical_size_symbol(k)] = args[k];

    switch (p.kind) {
      case PlanKind::TrueEval: {
        std::vector<ir::ExprPtr> factors;
        for (const auto& [w, count] : p.terms) {
          factors.push_back(
              ir::exp(ir::mul(ir::constant(w), ir::size_val(count.substitute(env)))));
        }
        out.push_back(Stmt::assign(target, product(factors)));
        return;
      }
      case PlanKind::Simplify: {
        const std::string c = new_var();
        gen(p.children[0].sid, bind(p.children[0].args, env), c, out, enclosing);
        out.push_back(Stmt::assign(
            target, ir::mul(ir::pow(ir::constant(2.0), p.amount.substitute(env)), ir::var(c))));
        return;
      }
      case PlanKind::Components: {
        std::vector<std::string> vars;
        for (std::size_t k = 0; k < p.children.size(); ++k) vars.push_back(new_var());
        std::vector<ir::ExprPtr> factors;
        for (std::size_t k = 0; k < p.children.size(); ++k) {
          gen(p.children[k].sid, bind(p.children[k].args, env), vars[k], out, enclosing);
          factors.push_back(ir::var(vars[k]));
        }
        out.push_back(Stmt::assign(target, product(factors)));
        return;
      }
      case PlanKind::Decomposer: {
        const std::string c = new_var();
        gen(p.children[0].sid, bind(p.children[0].args, env), c, out, enclosing);
        out.push_back(Stmt::assign(target, ir::pow(ir::var(c), p.amount.substitute(env))));
        return;
      }
      case PlanKind::GroundCase: {
        const std::string t = new_var();
        const std::string f = new_var();
        gen(p.children[0].sid, bind(p.children[0].args, env), t, out, enclosing);
        gen(p.children[1].sid, bind(p.children[1].args, env), f, out, enclosing);
        out.push_back(Stmt::assign(target, ir::add(ir::var(t), ir::var(f))));
        return;
      }
      case PlanKind::LiftedCase: {
        const std::string idx = new_index();
        const std::string c = new_var();
        const SizeExpr n = p.amount.substitute(env);
        env[kCaseIndex] = SizeExpr::symbol(idx);
        std::vector<std::string> inner = enclosing;
        inner.push_back(idx);
        std::vector<Stmt> body;
        gen(p.children[0].sid, bind(p.children[0].args, env), c, body, inner);
        body.push_back(Stmt::accum_add(
            target, ir::mul(ir::choose(n, SizeExpr::symbol(idx)), ir::var(c))));
        out.push_back(Stmt::accum_init(target));
        out.push_back(Stmt::loop(idx, SizeExpr(0), n, std::move(body)));
        return;
      }
      case PlanKind::GroundLVar: {
        const SizeExpr sel = p.amount.substitute(env);
        if (auto v = sel.constant()) {
          const PlanChild g = pl_.ground_child(sid, *v);
          note_edge(g.sid);
          gen(g.sid, bind(g.args, env), target, out, enclosing);
          return;
        }
        std::vector<PlanChild> kids;
        for (std::int64_t v = 0; v <= max_size_; ++v) {
          kids.push_back(pl_.ground_child(sid, v));
          note_edge(kids.back().sid);
        }
        std::vector<ir::SelectCase> cases;
        for (std::int64_t v = 0; v <= max_size_; ++v) {
          ir::SelectCase sc;
          sc.value = v;
          const std::string c = new_var();
          auto benv = env;
          benv[canonical_size_symbol(p.grounded_slot)] = SizeExpr(v);
          gen(kids[static_cast<std::size_t>(v)].sid,
              bind(kids[static_cast<std::size_t>(v)].args, benv), c, sc.body, enclosing);
          sc.result = ir::var(c);
          cases.push_back(std::move(sc));
        }
        out.push_back(Stmt::select(target, sel, std::move(cases)));
        return;
      }
    }
  }

  Planner& pl_;
  std::int64_t max_size_;
  int next_var_ = 1;
  int next_index_ = 1;
  std::map<int, Info> info_;
  std::map<int, std::string> sub_names_;
  std::vector<ir::Subroutine> subs_;
};

}  // namespace

ir::Program compile(Planner& planner, const MLN& m, CompileStats* stats) {
  if (!m.all_sizes_constant()) throw ModelError("compilation needs concrete population sizes");
  std::int64_t max_size = 0;
  for (const auto& [name, p] : m.populations) max_size = std::max(max_size, p.concrete_size());
  auto [sid, sizes] = planner.intern(m);
  Compiler c(planner, max_size);
  ir::Program prog = c.run(sid, sizes);
  if (stats) {
    stats->shapes = planner.shape_count();
    stats->subroutines = c.subroutine_count();
  }
  return prog;
}

ir::Program compile(const MLN& m, const CaseAnalysisOrder& order, CompileStats* stats) {
  Planner planner(order);
  return compile(planner, m, stats);
}

}  // namespace liftc
