#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "liftc/size_expr.hpp"

namespace liftc::ir {

enum class ExprKind { Const, Var, SizeVal, Pow, Exp, Choose, Mul, Add, Call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expressions are written with linear-space meaning. The log-space emitter
// and interpreter reinterpret them: Mul adds logs, Add is a log-sum, Pow
// scales, Exp yields its argument, and the argument of Exp is plain real
// arithmetic.
struct Expr {
  ExprKind kind = ExprKind::Const;
  double value = 0.0;              // Const
  std::string name;                // Var, Call
  SizeExpr size;                   // SizeVal; Pow exponent; Choose n
  SizeExpr size2;                  // Choose k
  std::vector<ExprPtr> args;       // Pow/Exp: 1, Mul/Add: 2
  std::vector<SizeExpr> call_args; // Call
};

ExprPtr constant(double v);
ExprPtr var(std::string name);
ExprPtr size_val(SizeExpr s);
ExprPtr pow(ExprPtr base, SizeExpr exponent);
ExprPtr exp(ExprPtr arg);
ExprPtr choose(SizeExpr n, SizeExpr k);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr call(std::string name, std::vector<SizeExpr> args);

enum class StmtKind { Assign, Loop, AccumInit, AccumAdd, Select };

struct Stmt;

// One arm of a Select: run `body`, then the target takes `result`.
struct SelectCase {
  std::int64_t value = 0;
  std::vector<Stmt> body;
  ExprPtr result;
};

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  std::string var;          // Assign/AccumInit/AccumAdd/Select target; Loop index
  ExprPtr expr;             // Assign value; AccumAdd addend
  SizeExpr lower;           // Loop
  SizeExpr upper;           // Loop (inclusive); Select selector
  std::vector<Stmt> body;   // Loop
  std::vector<SelectCase> cases;  // Select

  static Stmt assign(std::string v, ExprPtr e);
  static Stmt loop(std::string index, SizeExpr lo, SizeExpr hi, std::vector<Stmt> body);
  static Stmt accum_init(std::string v);
  static Stmt accum_add(std::string v, ExprPtr e);
  static Stmt select(std::string v, SizeExpr selector, std::vector<SelectCase> cases);
};

// Memoized function of integer size parameters.
struct Subroutine {
  std::string name;
  std::vector<std::string> params;
  std::vector<Stmt> body;
  std::string result;
};

struct Program {
  std::vector<Subroutine> subroutines;  // callees precede callers
  std::vector<Stmt> body;
  std::string result;
  // Upper bound on every population size; sizes the memo key radix.
  std::int64_t max_size = 0;

  const Subroutine* find(const std::string& name) const;
};

// Total statements, counting nested bodies, select arms and subroutines.
std::size_t statement_count(const Program& p);
// Deepest Loop nesting; a Call contributes its callee's depth.
std::size_t loop_depth(const Program& p);

// Human-readable dump (linear notation), deterministic.
std::string to_string(const ExprPtr& e);
std::string to_string(const Program& p);

// Packs subroutine arguments into one integer key; radix max_size + 1.
// Returns false when the key would not fit in 63 bits.
bool memo_key_fits(std::size_t params, std::int64_t max_size);

}  // namespace liftc::ir
