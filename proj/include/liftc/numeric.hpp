#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace liftc {

enum class NumericMode { Linear, LogSpace };

// A nonnegative partition-function value held either directly or as its
// natural log.
class PartitionValue {
 public:
  enum class Repr { Linear, LogSpace };

  static PartitionValue linear(double v);
  static PartitionValue log_space(double ln_v);

  Repr repr() const { return repr_; }
  double raw() const { return value_; }
  double as_linear() const;
  double as_log() const;

 private:
  PartitionValue(Repr r, double v) : repr_(r), value_(v) {}
  Repr repr_;
  double value_;
};

// ln(n!) from a lazily grown table of std::lgamma(n + 1). Table entries are
// bit-identical to calling lgamma directly.
double log_factorial(std::int64_t n);

// Natural log of C(n, k). Exact integer arithmetic for n <= 60, log-gamma
// otherwise. Throws std::out_of_range unless 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

// C(n, k) as a double: exact for n <= 60, exp(log_choose) beyond.
double choose(std::int64_t n, std::int64_t k);

// Exact binomial for n <= 67 (fits in 64 bits).
std::uint64_t choose_exact(std::int64_t n, std::int64_t k);

// ln(e^a + e^b) shifted by the larger argument.
inline double log_add(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  // exp underflows to exactly 0 below this point.
  if (lo - hi < -746.0) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

// Streaming log-sum-exp: running maximum m and sum s of exp(x - m), so
// that the total is m + log(s). Start from m = -inf, s = 0.
inline void log_accumulate(double& m, double& s, double x) {
  if (x <= m) {
    s += std::exp(x - m);
  } else {
    s = s * std::exp(m - x) + 1.0;
    m = x;
  }
}

inline double log_accumulated(double m, double s) {
  return m == -std::numeric_limits<double>::infinity() ? m : m + std::log(s);
}

}  // namespace liftc
