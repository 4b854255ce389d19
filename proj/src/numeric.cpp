#include "liftc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftc {

PartitionValue PartitionValue::linear(double v) {
  if (!(v >= 0.0)) throw std::domain_error("partition value must be nonnegative");
  return {Repr::Linear, v};
}

PartitionValue PartitionValue::log_space(double ln_v) { return {Repr::LogSpace, ln_v}; }

double PartitionValue::as_linear() const {
  return repr_ == Repr::Linear ? value_ : std::exp(value_);
}

double PartitionValue::as_log() const {
  return repr_ == Repr::LogSpace ? value_ : std::log(value_);
}

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::out_of_range("log_factorial of negative");
  thread_local std::vector<double> table;
  auto idx = static_cast<std::size_t>(n);
  if (idx >= table.size()) {
    std::size_t old = table.size();
    table.resize(std::max(idx + 1, 2 * old));
    for (std::size_t i = old; i < table.size(); ++i) {
      table[i] = std::lgamma(static_cast<double>(i) + 1.0);
    }
  }
  return table[idx];
}

std::uint64_t choose_exact(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) {
    throw std::out_of_range("choose(" + std::to_string(n) + ", " +
                            std::to_string(k) + ") out of range");
  }
  if (n > 67) throw std::out_of_range("choose_exact limited to n <= 67");
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  // r * (n - k + i) is divisible by i at every step.
  for (std::int64_t i = 1; i <= k; ++i) {
    auto num = static_cast<std::uint64_t>(n - k + i);
    auto den = static_cast<std::uint64_t>(i);
    std::uint64_t g = std::gcd(r, den);
    r = (r / g) * (num / (den / g));
  }
  return r;
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) {
    throw std::out_of_range("log_choose(" + std::to_string(n) + ", " +
                            std::to_string(k) + ") out of range");
  }
  if (n <= 60) return std::log(static_cast<double>(choose_exact(n, k)));
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) {
    throw std::out_of_range("choose(" + std::to_string(n) + ", " +
                            std::to_string(k) + ") out of range");
  }
  if (n <= 60) return static_cast<double>(choose_exact(n, k));
  return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

}  // namespace liftc
