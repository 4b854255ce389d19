#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "liftc/codegen.hpp"
#include "liftc/numeric.hpp"

namespace liftc {

namespace {

using ir::Expr;
using ir::ExprKind;
using ir::ExprPtr;
using ir::Stmt;
using ir::StmtKind;

bool is_const(const ExprPtr& e, double v) { return e->kind == ExprKind::Const && e->value == v; }
bool is_const(const ExprPtr& e) { return e->kind == ExprKind::Const; }

// Folded constants must stay usable by the log-space reading of the IR.
std::optional<ExprPtr> folded(double r) {
  if (std::isfinite(r) && r > 0.0) return ir::constant(r);
  return std::nullopt;
}

ExprPtr fold(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::Call:
      return e;
    case ExprKind::SizeVal:
      if (auto c = e->size.constant()) return ir::constant(static_cast<double>(*c));
      return e;
    case ExprKind::Pow: {
      ExprPtr b = fold(e->args[0]);
      if (auto k = e->size.constant()) {
        if (*k == 0) return ir::constant(1.0);
        if (*k == 1) return b;
        if (is_const(b)) {
          if (auto r = folded(std::pow(b->value, static_cast<double>(*k)))) return *r;
        }
      }
      return b == e->args[0] ? e : ir::pow(b, e->size);
    }
    case ExprKind::Exp: {
      ExprPtr a = fold(e->args[0]);
      if (is_const(a)) {
        if (auto r = folded(std::exp(a->value))) return *r;
      }
      return a == e->args[0] ? e : ir::exp(a);
    }
    case ExprKind::Choose: {
      auto n = e->size.constant();
      auto k = e->size2.constant();
      if (n && k) {
        if (auto r = folded(choose(*n, *k))) return *r;
      }
      return e;
    }
    case ExprKind::Mul: {
      ExprPtr a = fold(e->args[0]);
      ExprPtr b = fold(e->args[1]);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a) && is_const(b)) {
        if (auto r = folded(a->value * b->value)) return *r;
      }
      return (a == e->args[0] && b == e->args[1]) ? e : ir::mul(a, b);
    }
    case ExprKind::Add: {
      ExprPtr a = fold(e->args[0]);
      ExprPtr b = fold(e->args[1]);
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      if (is_const(a) && is_const(b)) {
        if (auto r = folded(a->value + b->value)) return *r;
      }
      return (a == e->args[0] && b == e->args[1]) ? e : ir::add(a, b);
    }
  }
  return e;
}

ExprPtr replace_var(const ExprPtr& e, const std::string& v, const ExprPtr& with) {
  if (e->kind == ExprKind::Var) return e->name == v ? with : e;
  if (e->args.empty()) return e;
  bool changed = false;
  std::vector<ExprPtr> args;
  for (const auto& a : e->args) {
    args.push_back(replace_var(a, v, with));
    changed = changed || args.back() != a;
  }
  if (!changed) return e;
  auto copy = std::make_shared<Expr>(*e);
  copy->args = std::move(args);
  return copy;
}

void count_reads(const ExprPtr& e, std::map<std::string, int>& reads) {
  if (e->kind == ExprKind::Var) ++reads[e->name];
  for (const auto& a : e->args) count_reads(a, reads);
}

void count_reads(const std::vector<Stmt>& body, std::map<std::string, int>& reads) {
  for (const auto& s : body) {
    if (s.expr) count_reads(s.expr, reads);
    count_reads(s.body, reads);
    for (const auto& c : s.cases) {
      count_reads(c.body, reads);
      count_reads(c.result, reads);
    }
  }
}

int reads_in(const ExprPtr& e, const std::string& v) {
  std::map<std::string, int> r;
  count_reads(e, r);
  return r[v];
}

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::Var) out.insert(e->name);
  for (const auto& a : e->args) collect_vars(a, out);
}

void collect_writes(const std::vector<Stmt>& body, std::set<std::string>& out) {
  for (const auto& s : body) {
    if (s.kind != StmtKind::Loop) out.insert(s.var);
    collect_writes(s.body, out);
    for (const auto& c : s.cases) collect_writes(c.body, out);
  }
}

void fold_all(std::vector<Stmt>& body) {
  for (auto& s : body) {
    if (s.expr) s.expr = fold(s.expr);
    fold_all(s.body);
    for (auto& c : s.cases) {
      fold_all(c.body);
      c.result = fold(c.result);
    }
  }
}

void replace_everywhere(std::vector<Stmt>& body, const std::string& v, const ExprPtr& with) {
  for (auto& s : body) {
    if (s.expr) s.expr = fold(replace_var(s.expr, v, with));
    replace_everywhere(s.body, v, with);
    for (auto& c : s.cases) {
      replace_everywhere(c.body, v, with);
      c.result = fold(replace_var(c.result, v, with));
    }
  }
}

class FunctionPruner {
 public:
  FunctionPruner(std::vector<Stmt>& body, std::string result)
      : body_(body), result_(std::move(result)) {}

  void run() {
    fold_all(body_);
    bool changed = true;
    while (changed) {
      reads_.clear();
      count_reads(body_, reads_);
      ++reads_[result_];
      changed = propagate_constants();
      if (!changed) changed = scope_pass(body_, nullptr);
    }
  }

 private:
  bool propagate_constants() {
    std::string victim;
    ExprPtr value;
    find_constant(body_, victim, value);
    if (victim.empty()) return false;
    remove_assign(body_, victim);
    replace_everywhere(body_, victim, value);
    return true;
  }

  void find_constant(const std::vector<Stmt>& body, std::string& victim, ExprPtr& value) {
    for (const auto& s : body) {
      if (!victim.empty()) return;
      if (s.kind == StmtKind::Assign && s.var != result_ && is_const(s.expr)) {
        victim = s.var;
        value = s.expr;
        return;
      }
      find_constant(s.body, victim, value);
      for (const auto& c : s.cases) find_constant(c.body, victim, value);
    }
  }

  static bool remove_assign(std::vector<Stmt>& body, const std::string& v) {
    for (auto it = body.begin(); it != body.end(); ++it) {
      if (it->kind == StmtKind::Assign && it->var == v) {
        body.erase(it);
        return true;
      }
      if (remove_assign(it->body, v)) return true;
      for (auto& c : it->cases) {
        if (remove_assign(c.body, v)) return true;
      }
    }
    return false;
  }

  // One pass over a statement list (and, recursively, nested lists):
  // removes dead assignments and inlines single-use ones whose use is a
  // later statement of the same list. `tail` is the Select arm result that
  // follows the list, if any.
  bool scope_pass(std::vector<Stmt>& body, ExprPtr* tail) {
    for (std::size_t j = 0; j < body.size(); ++j) {
      Stmt& s = body[j];
      if ((s.kind == StmtKind::Assign || s.kind == StmtKind::Select) && reads_[s.var] == 0 &&
          s.var != result_) {
        body.erase(body.begin() + static_cast<std::ptrdiff_t>(j));
        return true;
      }
      if (s.kind == StmtKind::Assign && reads_[s.var] == 1 && s.var != result_) {
        if (inline_forward(body, j, tail)) return true;
      }
      if (scope_pass(s.body, nullptr)) return true;
      for (auto& c : s.cases) {
        if (scope_pass(c.body, &c.result)) return true;
      }
    }
    return false;
  }

  bool inline_forward(std::vector<Stmt>& body, std::size_t j, ExprPtr* tail) {
    const std::string v = body[j].var;
    const ExprPtr e = body[j].expr;
    std::set<std::string> deps;
    collect_vars(e, deps);
    std::set<std::string> written;
    for (std::size_t k = j + 1; k <= body.size(); ++k) {
      ExprPtr* site = nullptr;
      if (k == body.size()) {
        if (tail && reads_in(*tail, v) == 1) site = tail;
      } else if (body[k].expr && reads_in(body[k].expr, v) == 1) {
        site = &body[k].expr;
      }
      if (site) {
        for (const auto& d : deps) {
          if (written.count(d)) return false;
        }
        *site = fold(replace_var(*site, v, e));
        body.erase(body.begin() + static_cast<std::ptrdiff_t>(j));
        return true;
      }
      if (k < body.size()) {
        written.insert(body[k].var);
        collect_writes(body[k].body, written);
        for (const auto& c : body[k].cases) collect_writes(c.body, written);
      }
    }
    return false;
  }

  std::vector<Stmt>& body_;
  std::string result_;
  std::map<std::string, int> reads_;
};

ExprPtr subst_expr(const ExprPtr& e, const std::map<std::string, SizeExpr>& env) {
  auto copy = std::make_shared<Expr>(*e);
  copy->size = e->size.substitute(env);
  copy->size2 = e->size2.substitute(env);
  for (auto& a : copy->call_args) a = a.substitute(env);
  for (auto& a : copy->args) a = subst_expr(a, env);
  return copy;
}

void subst_sizes(std::vector<Stmt>& body, const std::map<std::string, SizeExpr>& env) {
  for (auto& s : body) {
    if (s.expr) s.expr = subst_expr(s.expr, env);
    s.lower = s.lower.substitute(env);
    s.upper = s.upper.substitute(env);
    subst_sizes(s.body, env);
    for (auto& c : s.cases) {
      subst_sizes(c.body, env);
      c.result = subst_expr(c.result, env);
    }
  }
}

// A Select on a known value becomes the chosen arm.
void resolve_selects(std::vector<Stmt>& body) {
  std::vector<Stmt> out;
  for (auto& s : body) {
    resolve_selects(s.body);
    for (auto& c : s.cases) resolve_selects(c.body);
    auto v = s.kind == StmtKind::Select ? s.upper.constant() : std::nullopt;
    if (!v) {
      out.push_back(std::move(s));
      continue;
    }
    for (auto& c : s.cases) {
      if (c.value != *v) continue;
      for (auto& b : c.body) out.push_back(std::move(b));
      out.push_back(Stmt::assign(s.var, c.result));
    }
  }
  body = std::move(out);
}

using CallSites = std::map<std::string, std::vector<const Expr*>>;

void find_calls(const ExprPtr& e, CallSites& sites) {
  if (e->kind == ExprKind::Call) sites[e->name].push_back(e.get());
  for (const auto& a : e->args) find_calls(a, sites);
}

void find_calls(const std::vector<Stmt>& body, CallSites& sites) {
  for (const auto& s : body) {
    if (s.expr) find_calls(s.expr, sites);
    find_calls(s.body, sites);
    for (const auto& c : s.cases) {
      find_calls(c.body, sites);
      find_calls(c.result, sites);
    }
  }
}

ExprPtr drop_call_arg(const ExprPtr& e, const std::string& callee, std::size_t j) {
  auto copy = std::make_shared<Expr>(*e);
  if (e->kind == ExprKind::Call && e->name == callee) {
    copy->call_args.erase(copy->call_args.begin() + static_cast<std::ptrdiff_t>(j));
  }
  for (auto& a : copy->args) a = drop_call_arg(a, callee, j);
  return copy;
}

void drop_call_arg(std::vector<Stmt>& body, const std::string& callee, std::size_t j) {
  for (auto& s : body) {
    if (s.expr) s.expr = drop_call_arg(s.expr, callee, j);
    drop_call_arg(s.body, callee, j);
    for (auto& c : s.cases) {
      drop_call_arg(c.body, callee, j);
      c.result = drop_call_arg(c.result, callee, j);
    }
  }
}

// Removes uncalled subroutines and substitutes parameters that receive the
// same constant at every call site. Returns true on any change.
bool specialize_once(ir::Program& p) {
  CallSites sites;
  find_calls(p.body, sites);
  for (const auto& s : p.subroutines) find_calls(s.body, sites);
  for (std::size_t k = 0; k < p.subroutines.size(); ++k) {
    ir::Subroutine& sub = p.subroutines[k];
    const auto& calls = sites[sub.name];
    if (calls.empty()) {
      p.subroutines.erase(p.subroutines.begin() + static_cast<std::ptrdiff_t>(k));
      return true;
    }
    for (std::size_t j = 0; j < sub.params.size(); ++j) {
      auto c = calls[0]->call_args[j].constant();
      if (!c) continue;
      bool same = true;
      for (const Expr* call : calls) same = same && call->call_args[j].constant() == c;
      if (!same) continue;
      const std::string callee = sub.name;
      subst_sizes(sub.body, {{sub.params[j], SizeExpr(*c)}});
      resolve_selects(sub.body);
      sub.params.erase(sub.params.begin() + static_cast<std::ptrdiff_t>(j));
      drop_call_arg(p.body, callee, j);
      for (auto& other : p.subroutines) drop_call_arg(other.body, callee, j);
      return true;
    }
  }
  return false;
}

}  // namespace

ir::Program prune(const ir::Program& p) {
  ir::Program out = p;
  while (specialize_once(out)) {
  }
  for (auto& s : out.subroutines) FunctionPruner(s.body, s.result).run();
  FunctionPruner(out.body, out.result).run();
  return out;
}

}  // namespace liftc
