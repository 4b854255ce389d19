#include "liftc/ir.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace liftc::ir {

namespace {

std::shared_ptr<Expr> make(ExprKind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

}  // namespace

ExprPtr constant(double v) {
  auto e = make(ExprKind::Const);
  e->value = v;
  return e;
}

ExprPtr var(std::string name) {
  auto e = make(ExprKind::Var);
  e->name = std::move(name);
  return e;
}

ExprPtr size_val(SizeExpr s) {
  auto e = make(ExprKind::SizeVal);
  e->size = std::move(s);
  return e;
}

ExprPtr pow(ExprPtr base, SizeExpr exponent) {
  auto e = make(ExprKind::Pow);
  e->args.push_back(std::move(base));
  e->size = std::move(exponent);
  return e;
}

ExprPtr exp(ExprPtr arg) {
  auto e = make(ExprKind::Exp);
  e->args.push_back(std::move(arg));
  return e;
}

ExprPtr choose(SizeExpr n, SizeExpr k) {
  auto e = make(ExprKind::Choose);
  e->size = std::move(n);
  e->size2 = std::move(k);
  return e;
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
  auto e = make(ExprKind::Mul);
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr add(ExprPtr a, ExprPtr b) {
  auto e = make(ExprKind::Add);
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr call(std::string name, std::vector<SizeExpr> args) {
  auto e = make(ExprKind::Call);
  e->name = std::move(name);
  e->call_args = std::move(args);
  return e;
}

Stmt Stmt::assign(std::string v, ExprPtr e) {
  Stmt s;
  s.kind = StmtKind::Assign;
  s.var = std::move(v);
  s.expr = std::move(e);
  return s;
}

Stmt Stmt::loop(std::string index, SizeExpr lo, SizeExpr hi, std::vector<Stmt> body) {
  Stmt s;
  s.kind = StmtKind::Loop;
  s.var = std::move(index);
  s.lower = std::move(lo);
  s.upper = std::move(hi);
  s.body = std::move(body);
  return s;
}

Stmt Stmt::accum_init(std::string v) {
  Stmt s;
  s.kind = StmtKind::AccumInit;
  s.var = std::move(v);
  return s;
}

Stmt Stmt::accum_add(std::string v, ExprPtr e) {
  Stmt s;
  s.kind = StmtKind::AccumAdd;
  s.var = std::move(v);
  s.expr = std::move(e);
  return s;
}

Stmt Stmt::select(std::string v, SizeExpr selector, std::vector<SelectCase> cases) {
  Stmt s;
  s.kind = StmtKind::Select;
  s.var = std::move(v);
  s.upper = std::move(selector);
  s.cases = std::move(cases);
  return s;
}

const Subroutine* Program::find(const std::string& name) const {
  for (const auto& s : subroutines) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

std::size_t count_stmts(const std::vector<Stmt>& body) {
  std::size_t n = 0;
  for (const auto& s : body) {
    ++n;
    n += count_stmts(s.body);
    for (const auto& c : s.cases) n += count_stmts(c.body);
  }
  return n;
}

struct DepthCalc {
  const Program& p;
  std::map<std::string, std::size_t> memo;

  std::size_t of_expr(const ExprPtr& e) {
    std::size_t d = 0;
    if (e->kind == ExprKind::Call) d = of_sub(e->name);
    for (const auto& a : e->args) d = std::max(d, of_expr(a));
    return d;
  }
  std::size_t of_body(const std::vector<Stmt>& body) {
    std::size_t d = 0;
    for (const auto& s : body) {
      if (s.expr) d = std::max(d, of_expr(s.expr));
      if (s.kind == StmtKind::Loop) d = std::max(d, 1 + of_body(s.body));
      for (const auto& c : s.cases) {
        d = std::max(d, of_body(c.body));
        if (c.result) d = std::max(d, of_expr(c.result));
      }
    }
    return d;
  }
  std::size_t of_sub(const std::string& name) {
    if (auto it = memo.find(name); it != memo.end()) return it->second;
    const Subroutine* s = p.find(name);
    std::size_t d = s ? of_body(s->body) : 0;
    memo[name] = d;
    return d;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump(std::ostringstream& os, const std::vector<Stmt>& body, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& s : body) {
    switch (s.kind) {
      case StmtKind::Assign:
        os << pad << s.var << " = " << to_string(s.expr) << "\n";
        break;
      case StmtKind::AccumInit:
        os << pad << s.var << " = 0\n";
        break;
      case StmtKind::AccumAdd:
        os << pad << s.var << " += " << to_string(s.expr) << "\n";
        break;
      case StmtKind::Loop:
        os << pad << "for " << s.var << " in " << s.lower.to_string() << ".."
           << s.upper.to_string() << ":\n";
        dump(os, s.body, indent + 1);
        break;
      case StmtKind::Select:
        os << pad << "select " << s.var << " on " << s.upper.to_string() << ":\n";
        for (const auto& c : s.cases) {
          os << pad << "  case " << c.value << ":\n";
          dump(os, c.body, indent + 2);
          os << pad << "    " << s.var << " = " << to_string(c.result) << "\n";
        }
        break;
    }
  }
}

}  // namespace

std::size_t statement_count(const Program& p) {
  std::size_t n = count_stmts(p.body);
  for (const auto& s : p.subroutines) n += count_stmts(s.body);
  return n;
}

std::size_t loop_depth(const Program& p) {
  DepthCalc calc{p, {}};
  return calc.of_body(p.body);
}

std::string to_string(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Const: return num(e->value);
    case ExprKind::Var: return e->name;
    case ExprKind::SizeVal: return "(" + e->size.to_string() + ")";
    case ExprKind::Pow:
      return "pow(" + to_string(e->args[0]) + ", " + e->size.to_string() + ")";
    case ExprKind::Exp: return "exp(" + to_string(e->args[0]) + ")";
    case ExprKind::Choose:
      return "Choose(" + e->size.to_string() + ", " + e->size2.to_string() + ")";
    case ExprKind::Mul: {
      std::string rhs = to_string(e->args[1]);
      if (e->args[1]->kind == ExprKind::Mul) rhs = "(" + rhs + ")";
      return to_string(e->args[0]) + " * " + rhs;
    }
    case ExprKind::Add: return "(" + to_string(e->args[0]) + " + " + to_string(e->args[1]) + ")";
    case ExprKind::Call: {
      std::string s = e->name + "(";
      for (std::size_t i = 0; i < e->call_args.size(); ++i) {
        if (i) s += ", ";
        s += e->call_args[i].to_string();
      }
      return s + ")";
    }
  }
  return "?";
}

std::string to_string(const Program& p) {
  std::ostringstream os;
  for (const auto& s : p.subroutines) {
    os << "def " << s.name << "(";
    for (std::size_t i = 0; i < s.params.size(); ++i) os << (i ? ", " : "") << s.params[i];
    os << "):\n";
    dump(os, s.body, 1);
    os << "  return " << s.result << "\n";
  }
  dump(os, p.body, 0);
  os << "result " << p.result << "\n";
  return os.str();
}

bool memo_key_fits(std::size_t params, std::int64_t max_size) {
  long double range = 1.0L;
  for (std::size_t i = 0; i < params; ++i) range *= static_cast<long double>(max_size + 1);
  return range < 9.2e18L;
}

}  // namespace liftc::ir
