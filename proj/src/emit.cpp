#include "liftc/emit.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace liftc {

namespace {

using ir::ExprKind;
using ir::ExprPtr;
using ir::Stmt;
using ir::StmtKind;

// Runtime support shared by both numeric modes. The arithmetic mirrors
// liftc's numeric helpers so that results agree with the interpreter.
constexpr const char* kPrelude = R"(#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#if defined(__GNUC__)
#define LC_HOT static inline __attribute__((always_inline))
#else
#define LC_HOT static inline
#endif

static void lc_fail(const char* what) {
  fprintf(stderr, "error: %s\n", what);
  exit(2);
}

static double* lc_lf = 0;
static long long lc_lf_size = 0;

LC_HOT double lc_log_factorial(long long n) {
  if (n < 0) lc_fail("log_factorial of negative");
  if (n >= lc_lf_size) {
    long long cap = lc_lf_size ? 2 * lc_lf_size : 64;
    if (cap < n + 1) cap = n + 1;
    lc_lf = (double*)realloc(lc_lf, (size_t)cap * sizeof(double));
    if (!lc_lf) lc_fail("out of memory");
    for (long long i = lc_lf_size; i < cap; ++i) lc_lf[i] = lgamma((double)i + 1.0);
    lc_lf_size = cap;
  }
  return lc_lf[n];
}

static unsigned long long lc_gcd(unsigned long long a, unsigned long long b) {
  while (b) {
    unsigned long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

static unsigned long long lc_choose_exact(long long n, long long k) {
  if (k > n - k) k = n - k;
  unsigned long long r = 1;
  for (long long i = 1; i <= k; ++i) {
    unsigned long long num = (unsigned long long)(n - k + i);
    unsigned long long den = (unsigned long long)i;
    unsigned long long g = lc_gcd(r, den);
    r = (r / g) * (num / (den / g));
  }
  return r;
}

LC_HOT double lc_choose(long long n, long long k) {
  if (k < 0 || k > n) lc_fail("choose out of range");
  if (n <= 60) return (double)lc_choose_exact(n, k);
  return exp(lc_log_factorial(n) - lc_log_factorial(k) - lc_log_factorial(n - k));
}

LC_HOT double lc_log_choose(long long n, long long k) {
  if (k < 0 || k > n) lc_fail("choose out of range");
  if (n <= 60) return log((double)lc_choose_exact(n, k));
  return lc_log_factorial(n) - lc_log_factorial(k) - lc_log_factorial(n - k);
}

LC_HOT double lc_log_add(double a, double b) {
  if (a == -HUGE_VAL) return b;
  if (b == -HUGE_VAL) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  if (lo - hi < -746.0) return hi;
  return hi + log1p(exp(lo - hi));
}

LC_HOT void lc_accumulate(double* m, double* s, double x) {
  if (x <= *m) {
    *s += exp(x - *m);
  } else {
    *s = *s * exp(*m - x) + 1.0;
    *m = x;
  }
}

LC_HOT double lc_accumulated(double m, double s) {
  return m == -HUGE_VAL ? m : m + log(s);
}

struct lc_memo {
  unsigned long long* keys;
  double* vals;
  unsigned char* used;
  size_t cap;
  size_t count;
};

static size_t lc_mix(unsigned long long k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  return (size_t)k;
}

static double* lc_memo_find(lc_memo* t, unsigned long long key) {
  if (!t->cap) return 0;
  size_t mask = t->cap - 1;
  for (size_t i = lc_mix(key) & mask;; i = (i + 1) & mask) {
    if (!t->used[i]) return 0;
    if (t->keys[i] == key) return &t->vals[i];
  }
}

static void lc_memo_insert(lc_memo* t, unsigned long long key, double v);

static void lc_memo_grow(lc_memo* t) {
  lc_memo old = *t;
  t->cap = old.cap ? 2 * old.cap : 64;
  t->keys = (unsigned long long*)calloc(t->cap, sizeof(unsigned long long));
  t->vals = (double*)calloc(t->cap, sizeof(double));
  t->used = (unsigned char*)calloc(t->cap, 1);
  if (!t->keys || !t->vals || !t->used) lc_fail("out of memory");
  t->count = 0;
  for (size_t i = 0; i < old.cap; ++i) {
    if (old.used[i]) lc_memo_insert(t, old.keys[i], old.vals[i]);
  }
  free(old.keys);
  free(old.vals);
  free(old.used);
}

static void lc_memo_insert(lc_memo* t, unsigned long long key, double v) {
  if (2 * (t->count + 1) > t->cap) lc_memo_grow(t);
  size_t mask = t->cap - 1;
  size_t i = lc_mix(key) & mask;
  while (t->used[i] && t->keys[i] != key) i = (i + 1) & mask;
  if (!t->used[i]) ++t->count;
  t->used[i] = 1;
  t->keys[i] = key;
  t->vals[i] = v;
}
)";

std::string literal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string size_text(const SizeExpr& s) { return "(" + s.to_string() + ")"; }

class Emitter {
 public:
  Emitter(const ir::Program& p, bool log, int precision)
      : p_(p), log_(log), precision_(precision) {}

  std::string run() {
    os_ << kPrelude;
    os_ << "\nstatic const long long lc_max_size = " << p_.max_size << "LL;\n";
    for (const auto& s : p_.subroutines) subroutine(s);
    os_ << "\nint main() {\n";
    body(p_.body, 1);
    const std::string r = p_.result;
    if (log_) {
      os_ << "  if (isnan(" << r << ")) {\n"
          << "    fprintf(stderr, \"error: lnZ is NaN\\n\");\n"
          << "    return 3;\n  }\n"
          << "  printf(\"lnZ %." << precision_ << "g\\n\", " << r << ");\n";
    } else {
      os_ << "  if (!isfinite(" << r << ")) {\n"
          << "    fprintf(stderr, \"error: Z is not finite in double precision\\n\");\n"
          << "    return 3;\n  }\n"
          << "  printf(\"Z %." << precision_ << "g\\n\", " << r << ");\n";
    }
    os_ << "  return 0;\n}\n";
    return os_.str();
  }

 private:
  void subroutine(const ir::Subroutine& s) {
    const std::string& f = s.name;
    const std::size_t k = s.params.size();
    os_ << "\n";
    if (k == 0) {
      os_ << "static int " << f << "_done = 0;\nstatic double " << f << "_value;\n";
    } else if (k == 1) {
      os_ << "static double* " << f << "_memo = 0;\n";
    } else {
      os_ << "static lc_memo " << f << "_memo = {0, 0, 0, 0, 0};\n";
    }
    os_ << "\nstatic double " << f << "(";
    for (std::size_t i = 0; i < k; ++i) os_ << (i ? ", " : "") << "long long " << s.params[i];
    os_ << ") {\n";
    if (k == 0) {
      os_ << "  if (" << f << "_done) return " << f << "_value;\n";
    } else {
      os_ << "  if (";
      for (std::size_t i = 0; i < k; ++i) {
        os_ << (i ? " || " : "") << s.params[i] << " < 0 || " << s.params[i] << " > lc_max_size";
      }
      os_ << ") lc_fail(\"argument out of range\");\n";
      os_ << "  const unsigned long long key = ";
      for (std::size_t i = 0; i < k; ++i) {
        if (i) os_ << " + ";
        os_ << "(unsigned long long)" << s.params[i];
        for (std::size_t j = 0; j < i; ++j) os_ << " * (unsigned long long)(lc_max_size + 1)";
      }
      os_ << ";\n";
      if (k == 1) {
        os_ << "  if (!" << f << "_memo) {\n"
            << "    " << f << "_memo = (double*)malloc((size_t)(lc_max_size + 1) * sizeof(double));\n"
            << "    if (!" << f << "_memo) lc_fail(\"out of memory\");\n"
            << "    for (long long j = 0; j <= lc_max_size; ++j) " << f << "_memo[j] = NAN;\n"
            << "  }\n"
            << "  if (!isnan(" << f << "_memo[key])) return " << f << "_memo[key];\n";
      } else {
        os_ << "  const double* hit = lc_memo_find(&" << f << "_memo, key);\n"
            << "  if (hit) return *hit;\n";
      }
    }
    body(s.body, 1);
    if (k == 0) {
      os_ << "  " << f << "_value = " << s.result << ";\n  " << f << "_done = 1;\n";
    } else if (k == 1) {
      os_ << "  " << f << "_memo[key] = " << s.result << ";\n";
    } else {
      os_ << "  lc_memo_insert(&" << f << "_memo, key, " << s.result << ");\n";
    }
    os_ << "  return " << s.result << ";\n}\n";
  }

  void body(const std::vector<Stmt>& stmts, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const auto& s : stmts) {
      switch (s.kind) {
        case StmtKind::Assign:
          os_ << pad << "const double " << s.var << " = " << value(s.expr) << ";\n";
          break;
        case StmtKind::AccumInit:
          if (log_) {
            os_ << pad << "double " << s.var << " = -HUGE_VAL;\n";
            os_ << pad << "double " << s.var << "_sum = 0.0;\n";
          } else {
            os_ << pad << "double " << s.var << " = 0.0;\n";
          }
          break;
        case StmtKind::AccumAdd:
          if (log_) {
            os_ << pad << "lc_accumulate(&" << s.var << ", &" << s.var << "_sum, " << value(s.expr)
                << ");\n";
          } else {
            os_ << pad << s.var << " = " << s.var << " + " << value(s.expr) << ";\n";
          }
          break;
        case StmtKind::Loop: {
          os_ << pad << "for (long long " << s.var << " = " << s.lower.to_string() << "; " << s.var
              << " <= " << s.upper.to_string() << "; ++" << s.var << ") {\n";
          body(s.body, indent + 1);
          os_ << pad << "}\n";
          if (!log_) break;
          std::vector<std::string> done;
          for (const auto& b : s.body) {
            if (b.kind != StmtKind::AccumAdd) continue;
            if (std::find(done.begin(), done.end(), b.var) != done.end()) continue;
            done.push_back(b.var);
            os_ << pad << b.var << " = lc_accumulated(" << b.var << ", " << b.var << "_sum);\n";
          }
          break;
        }
        case StmtKind::Select:
          os_ << pad << "double " << s.var << ";\n";
          os_ << pad << "switch (" << s.upper.to_string() << ") {\n";
          for (const auto& c : s.cases) {
            os_ << pad << "  case " << c.value << ": {\n";
            body(c.body, indent + 2);
            os_ << pad << "    " << s.var << " = " << value(c.result) << ";\n";
            os_ << pad << "    break;\n" << pad << "  }\n";
          }
          os_ << pad << "  default:\n" << pad << "    lc_fail(\"no case for population size\");\n";
          os_ << pad << "    " << s.var << " = 0.0;\n";
          os_ << pad << "}\n";
          break;
      }
    }
  }

  // Plain arithmetic (arguments of exp).
  std::string real(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::Const: return literal(e->value);
      case ExprKind::SizeVal: return "(double)" + size_text(e->size);
      case ExprKind::Mul: return "(" + real(e->args[0]) + " * " + real(e->args[1]) + ")";
      case ExprKind::Add: return "(" + real(e->args[0]) + " + " + real(e->args[1]) + ")";
      case ExprKind::Pow:
        return "pow(" + real(e->args[0]) + ", (double)" + size_text(e->size) + ")";
      case ExprKind::Exp: return "exp(" + real(e->args[0]) + ")";
      case ExprKind::Choose:
        return "lc_choose(" + e->size.to_string() + ", " + e->size2.to_string() + ")";
      default: throw std::logic_error("variable inside exponent");
    }
  }

  std::string value(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::Const:
        return log_ ? "log(" + literal(e->value) + ")" : literal(e->value);
      case ExprKind::Var: return e->name;
      case ExprKind::SizeVal:
        return log_ ? "log((double)" + size_text(e->size) + ")" : "(double)" + size_text(e->size);
      case ExprKind::Pow:
        if (log_) return "((double)" + size_text(e->size) + " * " + value(e->args[0]) + ")";
        return "pow(" + value(e->args[0]) + ", (double)" + size_text(e->size) + ")";
      case ExprKind::Exp:
        return log_ ? real(e->args[0]) : "exp(" + real(e->args[0]) + ")";
      case ExprKind::Choose:
        return std::string(log_ ? "lc_log_choose(" : "lc_choose(") + e->size.to_string() + ", " +
               e->size2.to_string() + ")";
      case ExprKind::Mul:
        return "(" + value(e->args[0]) + (log_ ? " + " : " * ") + value(e->args[1]) + ")";
      case ExprKind::Add:
        if (log_) return "lc_log_add(" + value(e->args[0]) + ", " + value(e->args[1]) + ")";
        return "(" + value(e->args[0]) + " + " + value(e->args[1]) + ")";
      case ExprKind::Call: {
        std::string s = e->name + "(";
        for (std::size_t i = 0; i < e->call_args.size(); ++i) {
          if (i) s += ", ";
          s += e->call_args[i].to_string();
        }
        return s + ")";
      }
    }
    return "0.0";
  }

  const ir::Program& p_;
  bool log_;
  int precision_;
  std::ostringstream os_;
};

}  // namespace

std::string emit(const ir::Program& p, const EmitterConfig& cfg) {
  bool log = false;
  if (cfg.dialect == "cpp") {
    log = cfg.mode == NumericMode::LogSpace;
  } else if (cfg.dialect == "cpp-log") {
    log = true;
  } else {
    throw std::invalid_argument("unknown dialect '" + cfg.dialect + "' (expected cpp or cpp-log)");
  }
  if (cfg.precision < 1 || cfg.precision > 17) {
    throw std::invalid_argument("precision must be between 1 and 17");
  }
  return Emitter(p, log, cfg.precision).run();
}

}  // namespace liftc
