#include "walkthrough.hpp"

namespace liftc::testing {

namespace {

using ir::ExprKind;
using ir::StmtKind;

bool is_var(const ir::ExprPtr& e, const std::string& name) {
  return e && e->kind == ExprKind::Var && e->name == name;
}

const ir::Stmt* find_assign(const std::vector<ir::Stmt>& body, const std::string& var) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Assign && s.var == var) return &s;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> walkthrough_mismatches(const ir::Program& p) {
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
    return ok;
  };

  expect(p.subroutines.empty(), "no subroutines");
  expect(ir::loop_depth(p) == 2, "loop nesting depth 2");
  if (!expect(!p.body.empty(), "nonempty body")) return bad;

  const ir::Stmt& root = p.body.back();
  expect(p.result == "v1", "result variable v1");
  const bool root_ok = root.kind == StmtKind::Assign && root.var == "v1" && root.expr &&
                       root.expr->kind == ExprKind::Pow && root.expr->size == SizeExpr(5) &&
                       is_var(root.expr->args.at(0), "v2");
  if (!expect(root_ok, "v1 = pow(v2, 5)")) return bad;

  const ir::Stmt* loop = nullptr;
  for (const auto& s : p.body) {
    if (s.kind == StmtKind::Loop) loop = &s;
  }
  if (!expect(loop != nullptr, "top-level loop")) return bad;
  const SizeExpr i = SizeExpr::symbol(loop->var);
  expect(loop->lower == SizeExpr(0) && loop->upper == SizeExpr(2), "inclusive loop 0..2");
  if (!expect(!loop->body.empty(), "loop body")) return bad;

  const ir::Stmt& acc = loop->body.back();
  const bool acc_ok = acc.kind == StmtKind::AccumAdd && acc.var == "v2" && acc.expr &&
                      acc.expr->kind == ExprKind::Mul &&
                      acc.expr->args.at(0)->kind == ExprKind::Choose &&
                      acc.expr->args.at(0)->size == SizeExpr(2) && acc.expr->args.at(0)->size2 == i &&
                      is_var(acc.expr->args.at(1), "v3");
  if (!expect(acc_ok, "v2 += Choose(2, i) * v3")) return bad;

  const ir::Stmt* v3 = find_assign(loop->body, "v3");
  const bool v3_ok = v3 && v3->expr->kind == ExprKind::Mul &&
                     v3->expr->args.at(0)->kind == ExprKind::Pow &&
                     v3->expr->args.at(0)->args.at(0)->kind == ExprKind::Const &&
                     v3->expr->args.at(0)->args.at(0)->value == 2.0 &&
                     v3->expr->args.at(0)->size == SizeExpr(2) - i && is_var(v3->expr->args.at(1), "v4");
  if (!expect(v3_ok, "v3 = pow(2, 2 - i) * v4")) return bad;

  const ir::Stmt* v4 = find_assign(loop->body, "v4");
  expect(v4 && v4->expr->kind == ExprKind::Mul && v4->expr->args.at(0)->kind == ExprKind::Var &&
             v4->expr->args.at(1)->kind == ExprKind::Var,
         "v4 = product of two components");

  bool inner = false;
  for (const auto& s : loop->body) inner = inner || s.kind == StmtKind::Loop;
  expect(inner, "inner loop for the first component");
  return bad;
}

}  // namespace liftc::testing
