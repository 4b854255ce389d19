#include "liftc/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftc/errors.hpp"

namespace liftc {

namespace {

using ir::ExprKind;
using ir::StmtKind;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Open-addressing map from packed argument keys to values.
class MemoTable {
 public:
  double* find(std::uint64_t key) {
    if (keys_.empty()) return nullptr;
    std::size_t mask = keys_.size() - 1;
    for (std::size_t i = mix(key) & mask;; i = (i + 1) & mask) {
      if (!used_[i]) return nullptr;
      if (keys_[i] == key) return &vals_[i];
    }
  }
  void insert(std::uint64_t key, double v) {
    if (2 * (count_ + 1) > keys_.size()) grow();
    std::size_t mask = keys_.size() - 1;
    std::size_t i = mix(key) & mask;
    while (used_[i] && keys_[i] != key) i = (i + 1) & mask;
    if (!used_[i]) ++count_;
    used_[i] = 1;
    keys_[i] = key;
    vals_[i] = v;
  }

 private:
  static std::size_t mix(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
  void grow() {
    std::vector<std::uint64_t> ok = std::move(keys_);
    std::vector<double> ov = std::move(vals_);
    std::vector<unsigned char> ou = std::move(used_);
    std::size_t cap = ok.empty() ? 64 : 2 * ok.size();
    keys_.assign(cap, 0);
    vals_.assign(cap, 0.0);
    used_.assign(cap, 0);
    count_ = 0;
    for (std::size_t i = 0; i < ok.size(); ++i) {
      if (ou[i]) insert(ok[i], ov[i]);
    }
  }
  std::vector<std::uint64_t> keys_;
  std::vector<double> vals_;
  std::vector<unsigned char> used_;
  std::size_t count_ = 0;
};

struct CExpr {
  ExprKind kind = ExprKind::Const;
  double value = 0.0;
  int slot = -1;  // Var: real slot; Call: callee index
  SlotPolynomial size, size2;
  std::vector<CExpr> args;
  std::vector<SlotPolynomial> call_args;
};

struct CStmt;
struct CCase {
  std::vector<CStmt> body;
  CExpr result;
};

struct CStmt {
  StmtKind kind = StmtKind::Assign;
  int slot = -1;  // real target, or integer slot for Loop
  int aux = -1;   // log-space running sum of an accumulator
  std::vector<std::pair<int, int>> accumulators;  // Loop: (slot, aux) to finish
  CExpr expr;
  SlotPolynomial lower, upper;
  std::vector<CStmt> body;
  std::vector<CCase> cases;  // indexed by case value
};

struct CFunction {
  std::size_t num_params = 0;
  std::size_t num_reals = 0;
  std::size_t num_ints = 0;
  std::vector<CStmt> body;
  int result = -1;
  // Memo storage by arity: flag, dense vector, hash table.
  bool have_scalar = false;
  double scalar = 0.0;
  std::vector<double> dense;
  MemoTable table;
};

class Lowering {
 public:
  Lowering(const ir::Program& p, const std::map<std::string, int>& callees)
      : prog_(p), callees_(callees) {}

  CFunction lower(const std::vector<std::string>& params, const std::vector<ir::Stmt>& body,
                  const std::string& result) {
    reals_.clear();
    ints_.clear();
    for (const auto& q : params) ints_.emplace(q, static_cast<int>(ints_.size()));
    CFunction f;
    f.num_params = params.size();
    f.body = lower_body(body);
    f.result = real(result);
    f.num_reals = reals_.size();
    f.num_ints = ints_.size();
    return f;
  }

 private:
  int real(const std::string& v) {
    auto [it, fresh] = reals_.emplace(v, static_cast<int>(reals_.size()));
    (void)fresh;
    return it->second;
  }
  int integer(const std::string& v) {
    auto [it, fresh] = ints_.emplace(v, static_cast<int>(ints_.size()));
    (void)fresh;
    return it->second;
  }
  SlotPolynomial poly(const SizeExpr& e) { return SlotPolynomial(e, ints_); }

  CExpr lower_expr(const ir::ExprPtr& e) {
    CExpr c;
    c.kind = e->kind;
    c.value = e->value;
    switch (e->kind) {
      case ExprKind::Var: c.slot = real(e->name); break;
      case ExprKind::SizeVal:
      case ExprKind::Pow: c.size = poly(e->size); break;
      case ExprKind::Choose:
        c.size = poly(e->size);
        c.size2 = poly(e->size2);
        break;
      case ExprKind::Call: {
        auto it = callees_.find(e->name);
        if (it == callees_.end()) throw std::logic_error("unknown subroutine " + e->name);
        c.slot = it->second;
        for (const auto& a : e->call_args) c.call_args.push_back(poly(a));
        break;
      }
      default: break;
    }
    for (const auto& a : e->args) c.args.push_back(lower_expr(a));
    return c;
  }

  std::vector<CStmt> lower_body(const std::vector<ir::Stmt>& body) {
    std::vector<CStmt> out;
    for (const auto& s : body) {
      CStmt c;
      c.kind = s.kind;
      switch (s.kind) {
        case StmtKind::Assign:
          c.expr = lower_expr(s.expr);
          c.slot = real(s.var);
          break;
        case StmtKind::AccumAdd:
          c.expr = lower_expr(s.expr);
          c.slot = real(s.var);
          c.aux = real(s.var + "#sum");
          break;
        case StmtKind::AccumInit:
          c.slot = real(s.var);
          c.aux = real(s.var + "#sum");
          break;
        case StmtKind::Loop:
          c.lower = poly(s.lower);
          c.upper = poly(s.upper);
          c.slot = integer(s.var);
          c.body = lower_body(s.body);
          for (const auto& b : c.body) {
            std::pair<int, int> acc{b.slot, b.aux};
            if (b.kind == StmtKind::AccumAdd &&
                std::find(c.accumulators.begin(), c.accumulators.end(), acc) ==
                    c.accumulators.end()) {
              c.accumulators.push_back(acc);
            }
          }
          break;
        case StmtKind::Select: {
          c.slot = real(s.var);
          c.upper = poly(s.upper);
          c.cases.resize(s.cases.size());
          for (const auto& sc : s.cases) {
            auto idx = static_cast<std::size_t>(sc.value);
            if (sc.value < 0 || idx >= s.cases.size()) {
              throw std::logic_error("select arms must cover 0..max");
            }
            c.cases[idx].body = lower_body(sc.body);
            c.cases[idx].result = lower_expr(sc.result);
          }
          break;
        }
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  const ir::Program& prog_;
  const std::map<std::string, int>& callees_;
  std::map<std::string, int> reals_;
  std::map<std::string, int> ints_;
};

class Machine {
 public:
  Machine(std::vector<CFunction>& fns, std::int64_t max_size, NumericMode mode,
          InterpretStats& stats)
      : fns_(fns), radix_(static_cast<std::uint64_t>(max_size) + 1), max_size_(max_size),
        log_(mode == NumericMode::LogSpace), stats_(stats) {}

  double run(CFunction& f, std::vector<std::int64_t> ints) {
    std::vector<double> reals(f.num_reals, 0.0);
    ints.resize(f.num_ints, 0);
    exec(f.body, reals, ints);
    return reals[static_cast<std::size_t>(f.result)];
  }

 private:
  double call(const CExpr& e, std::span<const std::int64_t> env) {
    CFunction& f = fns_[static_cast<std::size_t>(e.slot)];
    std::vector<std::int64_t> args;
    args.reserve(f.num_ints);
    std::uint64_t key = 0;
    std::uint64_t scale = 1;
    for (const auto& a : e.call_args) {
      std::int64_t v = a(env);
      if (v < 0 || v > max_size_) throw std::logic_error("subroutine argument out of range");
      args.push_back(v);
      key += static_cast<std::uint64_t>(v) * scale;
      scale *= radix_;
    }
    ++stats_.calls;
    if (f.num_params == 0) {
      if (f.have_scalar) {
        ++stats_.memo_hits;
        return f.scalar;
      }
      f.scalar = run(f, std::move(args));
      f.have_scalar = true;
      return f.scalar;
    }
    if (f.num_params == 1) {
      if (f.dense.empty()) f.dense.assign(radix_, kNaN);
      double& slot = f.dense[key];
      if (!std::isnan(slot)) {
        ++stats_.memo_hits;
        return slot;
      }
      double v = run(f, std::move(args));
      f.dense[key] = v;
      return v;
    }
    if (double* hit = f.table.find(key)) {
      ++stats_.memo_hits;
      return *hit;
    }
    double v = run(f, std::move(args));
    f.table.insert(key, v);
    return v;
  }

  // Plain arithmetic, used for arguments of Exp.
  double real_value(const CExpr& e, std::span<const std::int64_t> env) {
    switch (e.kind) {
      case ExprKind::Const: return e.value;
      case ExprKind::SizeVal: return static_cast<double>(e.size(env));
      case ExprKind::Mul: return real_value(e.args[0], env) * real_value(e.args[1], env);
      case ExprKind::Add: return real_value(e.args[0], env) + real_value(e.args[1], env);
      case ExprKind::Pow:
        return std::pow(real_value(e.args[0], env), static_cast<double>(e.size(env)));
      case ExprKind::Exp: return std::exp(real_value(e.args[0], env));
      case ExprKind::Choose: return choose(e.size(env), e.size2(env));
      default: throw std::logic_error("variable inside exponent");
    }
  }

  double value(const CExpr& e, const std::vector<double>& reals,
               std::span<const std::int64_t> env) {
    switch (e.kind) {
      case ExprKind::Const: return log_ ? std::log(e.value) : e.value;
      case ExprKind::Var: return reals[static_cast<std::size_t>(e.slot)];
      case ExprKind::SizeVal: {
        double s = static_cast<double>(e.size(env));
        return log_ ? std::log(s) : s;
      }
      case ExprKind::Pow: {
        double b = value(e.args[0], reals, env);
        double s = static_cast<double>(e.size(env));
        return log_ ? s * b : std::pow(b, s);
      }
      case ExprKind::Exp: {
        double a = real_value(e.args[0], env);
        return log_ ? a : std::exp(a);
      }
      case ExprKind::Choose:
        return log_ ? log_choose(e.size(env), e.size2(env)) : choose(e.size(env), e.size2(env));
      case ExprKind::Mul: {
        double a = value(e.args[0], reals, env);
        double b = value(e.args[1], reals, env);
        return log_ ? a + b : a * b;
      }
      case ExprKind::Add: {
        double a = value(e.args[0], reals, env);
        double b = value(e.args[1], reals, env);
        return log_ ? log_add(a, b) : a + b;
      }
      case ExprKind::Call: return call(e, env);
    }
    return kNaN;
  }

  void exec(const std::vector<CStmt>& body, std::vector<double>& reals,
            std::vector<std::int64_t>& ints) {
    for (const auto& s : body) {
      auto target = static_cast<std::size_t>(s.slot);
      switch (s.kind) {
        case StmtKind::Assign: reals[target] = value(s.expr, reals, ints); break;
        case StmtKind::AccumInit:
          reals[target] = log_ ? kNegInf : 0.0;
          reals[static_cast<std::size_t>(s.aux)] = 0.0;
          break;
        case StmtKind::AccumAdd: {
          double e = value(s.expr, reals, ints);
          if (log_) {
            log_accumulate(reals[target], reals[static_cast<std::size_t>(s.aux)], e);
          } else {
            reals[target] = reals[target] + e;
          }
          break;
        }
        case StmtKind::Loop: {
          std::int64_t lo = s.lower(ints);
          std::int64_t hi = s.upper(ints);
          for (std::int64_t i = lo; i <= hi; ++i) {
            ints[target] = i;
            exec(s.body, reals, ints);
          }
          if (log_) {
            for (auto [m, sum] : s.accumulators) {
              auto mi = static_cast<std::size_t>(m);
              reals[mi] = log_accumulated(reals[mi], reals[static_cast<std::size_t>(sum)]);
            }
          }
          break;
        }
        case StmtKind::Select: {
          std::int64_t sel = s.upper(ints);
          if (sel < 0 || static_cast<std::size_t>(sel) >= s.cases.size()) {
            throw std::logic_error("select value " + std::to_string(sel) + " has no arm");
          }
          const CCase& c = s.cases[static_cast<std::size_t>(sel)];
          exec(c.body, reals, ints);
          reals[target] = value(c.result, reals, ints);
          break;
        }
      }
    }
  }

  std::vector<CFunction>& fns_;
  std::uint64_t radix_;
  std::int64_t max_size_;
  bool log_;
  InterpretStats& stats_;
};

}  // namespace

PartitionValue interpret(const ir::Program& p, NumericMode mode, InterpretStats* stats) {
  std::map<std::string, int> callees;
  for (std::size_t i = 0; i < p.subroutines.size(); ++i) {
    callees[p.subroutines[i].name] = static_cast<int>(i);
  }
  Lowering lw(p, callees);
  std::vector<CFunction> fns;
  for (const auto& s : p.subroutines) fns.push_back(lw.lower(s.params, s.body, s.result));
  CFunction root = lw.lower({}, p.body, p.result);

  InterpretStats local;
  Machine m(fns, p.max_size, mode, stats ? *stats : local);
  double v = m.run(root, {});
  if (mode == NumericMode::Linear) {
    if (!std::isfinite(v)) throw NumericError("partition function not finite in double precision");
    return PartitionValue::linear(v);
  }
  if (std::isnan(v)) throw NumericError("log partition function is NaN");
  return PartitionValue::log_space(v);
}

}  // namespace liftc
