#include "liftc/size_expr.hpp"

#include <algorithm>
#include <stdexcept>

namespace liftc {

SizeExpr::SizeExpr(std::int64_t constant) {
  if (constant != 0) terms_[{}] = constant;
}

SizeExpr SizeExpr::symbol(std::string name) {
  SizeExpr e;
  e.terms_[{std::move(name)}] = 1;
  return e;
}

void SizeExpr::add_term(const Monomial& m, std::int64_t coef) {
  if (coef == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

SizeExpr operator+(const SizeExpr& a, const SizeExpr& b) {
  SizeExpr r = a;
  for (const auto& [m, c] : b.terms_) r.add_term(m, c);
  return r;
}

SizeExpr operator-(const SizeExpr& a, const SizeExpr& b) {
  SizeExpr r = a;
  for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
  return r;
}

SizeExpr operator*(const SizeExpr& a, const SizeExpr& b) {
  SizeExpr r;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      SizeExpr::Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

bool SizeExpr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

std::optional<std::int64_t> SizeExpr::constant() const {
  if (terms_.empty()) return 0;
  if (is_constant()) return terms_.begin()->second;
  return std::nullopt;
}

std::int64_t SizeExpr::evaluate(
    const std::map<std::string, std::int64_t>& env) const {
  std::int64_t total = 0;
  for (const auto& [m, c] : terms_) {
    std::int64_t t = c;
    for (const auto& s : m) {
      auto it = env.find(s);
      if (it == env.end()) throw std::out_of_range("unbound size symbol '" + s + "'");
      t *= it->second;
    }
    total += t;
  }
  return total;
}

SizeExpr SizeExpr::substitute(const std::map<std::string, SizeExpr>& env) const {
  SizeExpr r;
  for (const auto& [m, c] : terms_) {
    SizeExpr t(c);
    for (const auto& s : m) {
      auto it = env.find(s);
      t = t * (it == env.end() ? SizeExpr::symbol(s) : it->second);
    }
    r = r + t;
  }
  return r;
}

std::set<std::string> SizeExpr::symbols() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_) out.insert(m.begin(), m.end());
  return out;
}

bool SizeExpr::mentions(std::string_view symbol) const {
  for (const auto& [m, c] : terms_) {
    if (std::find(m.begin(), m.end(), symbol) != m.end()) return true;
  }
  return false;
}

std::string SizeExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::int64_t mag = c < 0 ? -c : c;
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string body;
    if (m.empty() || mag != 1) body = std::to_string(mag);
    for (const auto& s : m) {
      if (!body.empty()) body += "*";
      body += s;
    }
    out += body;
  }
  return out;
}

SlotPolynomial::SlotPolynomial(const SizeExpr& e,
                               const std::map<std::string, int>& slots) {
  for (const auto& [m, c] : e.terms()) {
    std::vector<int> vars;
    for (const auto& s : m) {
      auto it = slots.find(s);
      if (it == slots.end()) {
        throw std::invalid_argument("size symbol '" + s + "' has no slot");
      }
      vars.push_back(it->second);
    }
    terms_.emplace_back(c, std::move(vars));
  }
}

}  // namespace liftc
