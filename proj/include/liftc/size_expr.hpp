#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace liftc {

// Integer polynomial over named size symbols (population sizes, loop
// indices, subroutine parameters). Sizes stay symbolic through rule
// application so that generated code can keep expressions like `2 - i`.
class SizeExpr {
 public:
  // Sorted multiset of symbol names; the empty monomial is the constant term.
  using Monomial = std::vector<std::string>;

  SizeExpr() = default;
  SizeExpr(std::int64_t constant);  // NOLINT(google-explicit-constructor)

  static SizeExpr symbol(std::string name);

  friend SizeExpr operator+(const SizeExpr& a, const SizeExpr& b);
  friend SizeExpr operator-(const SizeExpr& a, const SizeExpr& b);
  friend SizeExpr operator*(const SizeExpr& a, const SizeExpr& b);
  SizeExpr& operator+=(const SizeExpr& o) { return *this = *this + o; }
  SizeExpr& operator*=(const SizeExpr& o) { return *this = *this * o; }

  bool is_constant() const;
  bool is_zero() const { return terms_.empty(); }
  std::optional<std::int64_t> constant() const;

  // Throws std::out_of_range if a symbol is unbound.
  std::int64_t evaluate(const std::map<std::string, std::int64_t>& env) const;
  SizeExpr substitute(const std::map<std::string, SizeExpr>& env) const;
  std::set<std::string> symbols() const;
  bool mentions(std::string_view symbol) const;

  // Valid C/C++ integer expression, e.g. "2 - i1" or "n0*n1".
  std::string to_string() const;

  const std::map<Monomial, std::int64_t>& terms() const { return terms_; }

  friend bool operator==(const SizeExpr&, const SizeExpr&) = default;
  friend auto operator<=>(const SizeExpr&, const SizeExpr&) = default;

 private:
  void add_term(const Monomial& m, std::int64_t coef);
  std::map<Monomial, std::int64_t> terms_;
};

// SizeExpr lowered to slot indices for the evaluator's inner loops.
class SlotPolynomial {
 public:
  SlotPolynomial() = default;
  // `slots` maps each symbol to its index in the value span; unknown
  // symbols throw std::invalid_argument.
  SlotPolynomial(const SizeExpr& e, const std::map<std::string, int>& slots);

  std::int64_t operator()(std::span<const std::int64_t> values) const {
    std::int64_t total = 0;
    for (const auto& [coef, vars] : terms_) {
      std::int64_t t = coef;
      for (int v : vars) t *= values[static_cast<std::size_t>(v)];
      total += t;
    }
    return total;
  }

 private:
  std::vector<std::pair<std::int64_t, std::vector<int>>> terms_;
};

}  // namespace liftc
