#include "liftc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "liftc/errors.hpp"

namespace liftc {

namespace {

struct Pos {
  std::size_t line;
  std::size_t col;
};

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool at_end() {
    skip_ws();
    return i_ >= s_.size();
  }
  Pos pos() const { return {line_, i_ + 1}; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, i_ + 1, msg); }
  [[noreturn]] void fail_at(Pos p, const std::string& msg) const {
    throw ParseError(p.line, p.col, msg);
  }

  bool accept(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  bool peek(char c) {
    skip_ws();
    return i_ < s_.size() && s_[i_] == c;
  }

  std::string ident(const char* what) {
    skip_ws();
    std::size_t start = i_;
    if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      ++i_;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
        ++i_;
      }
    }
    if (start == i_) fail(std::string("expected ") + what);
    return std::string(s_.substr(start, i_ - start));
  }

  std::int64_t integer(const char* what) {
    skip_ws();
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s_.data() + i_, s_.data() + s_.size(), v);
    if (ec != std::errc() || p == s_.data() + i_) fail(std::string("expected ") + what);
    i_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }

  double real(const char* what) {
    skip_ws();
    std::string rest(s_.substr(i_));
    char* end = nullptr;
    double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail(std::string("expected ") + what);
    if (!std::isfinite(v)) fail(std::string(what) + " must be finite");
    i_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  void expect_end() {
    if (!at_end()) fail("unexpected trailing input");
  }

 private:
  std::string_view s_;
  std::size_t line_;
  std::size_t i_ = 0;
};

bool is_upper(const std::string& s) { return std::isupper(static_cast<unsigned char>(s[0])) != 0; }
bool is_lower(const std::string& s) { return std::islower(static_cast<unsigned char>(s[0])) != 0; }

class Parser {
 public:
  ModelFile run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      std::string_view line = text.substr(start, end - start);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      parse_line(line, line_no);
      start = end + 1;
    }
    check_lvars();
    out_.mln = MLN::from_formulas({}, std::move(wfs_));
    for (auto& [name, p] : pops_) out_.mln.add_population(std::move(p));
    out_.mln.validate();
    return std::move(out_);
  }

 private:
  void parse_line(std::string_view line, std::size_t line_no) {
    Cursor c(line, line_no);
    if (c.at_end()) return;
    Pos kw_pos = c.pos();
    std::string kw = c.ident("a keyword");
    if (kw == "population") {
      Pos p = c.pos();
      std::string name = c.ident("a population name");
      if (!is_lower(name)) c.fail_at(p, "population names must start with a lowercase letter");
      if (pops_.count(name)) c.fail_at(p, "population '" + name + "' declared twice");
      Pos sp = c.pos();
      std::int64_t n = c.integer("a population size");
      if (n < 0) c.fail_at(sp, "population size must be nonnegative");
      c.expect_end();
      pops_.emplace(name, Population(name, SizeExpr(n)));
    } else if (kw == "wf") {
      parse_wf(c);
    } else if (kw == "observe") {
      parse_observe(c);
    } else {
      c.fail_at(kw_pos, "unknown keyword '" + kw + "'");
    }
  }

  void note_lvar(const std::string& v, Pos p) { lvar_uses_.emplace_back(v, p); }

  void note_arity(const std::string& pred, std::size_t arity, Pos p, const Cursor& c) {
    auto [it, inserted] = arity_.emplace(pred, arity);
    if (!inserted && it->second != arity) {
      c.fail_at(p, "predicate '" + pred + "' used with arity " + std::to_string(arity) +
                       " but earlier with arity " + std::to_string(it->second));
    }
  }

  Prv parse_prv(Cursor& c, bool allow_vars) {
    Pos p = c.pos();
    std::string pred = c.ident("a predicate name");
    if (!is_upper(pred)) c.fail_at(p, "predicate names must start with an uppercase letter");
    Prv prv{pred, {}};
    if (c.accept('(')) {
      do {
        Pos tp = c.pos();
        std::string t = c.ident("a term");
        if (is_upper(t)) {
          prv.args.push_back(Term::constant(t));
        } else if (is_lower(t)) {
          if (!allow_vars) c.fail_at(tp, "observed atoms must be ground");
          note_lvar(t, tp);
          prv.args.push_back(Term::var(t));
        } else {
          c.fail_at(tp, "terms must start with a letter");
        }
      } while (c.accept(','));
      c.expect(')');
    }
    note_arity(pred, prv.arity(), p, c);
    return prv;
  }

  void parse_wf(Cursor& c) {
    double w = c.real("a weight");
    std::vector<std::string> lvars;
    bool explicit_l = false;
    if (c.accept('{')) {
      explicit_l = true;
      if (!c.peek('}')) {
        do {
          Pos p = c.pos();
          std::string v = c.ident("a logical variable");
          if (!is_lower(v)) c.fail_at(p, "logical variables must start with a lowercase letter");
          note_lvar(v, p);
          lvars.push_back(v);
        } while (c.accept(','));
      }
      c.expect('}');
    }
    c.expect(':');
    Pos fpos = c.pos();
    Formula f;
    std::vector<Literal> lits;
    bool constant_formula = false;
    {
      Cursor probe = c;
      std::string first = (probe.at_end() || probe.peek('!')) ? "" : probe.ident("a literal");
      if (first == "true" || first == "false") {
        c = probe;
        f = first == "true" ? Formula::truth() : Formula::falsity();
        constant_formula = true;
      }
    }
    if (!constant_formula) {
      do {
        bool positive = !c.accept('!');
        lits.push_back({parse_prv(c, true), positive});
      } while (c.accept('&'));
      f = Formula::conjunction(lits);
    }
    c.expect_end();
    std::set<std::string> fv;
    for (const auto& l : lits) {
      for (const auto& v : l.prv.lvars()) fv.insert(v);
    }
    if (explicit_l) {
      for (const auto& v : fv) {
        if (std::find(lvars.begin(), lvars.end(), v) == lvars.end()) {
          c.fail_at(fpos, "formula variable '" + v + "' is missing from the listed lvars");
        }
      }
    } else {
      lvars.assign(fv.begin(), fv.end());
    }
    WeightedFormula wf(std::move(lvars), std::move(f), w);
    // Families come from the literals even when they normalize away.
    for (const auto& l : lits) extra_prvs_.push_back(l.prv);
    wfs_.push_back(std::move(wf));
  }

  void parse_observe(Cursor& c) {
    Cursor probe = c;
    if (probe.ident("an atom") == "count") {
      c = probe;
      Pos p = c.pos();
      std::string pred = c.ident("a predicate name");
      if (!is_upper(pred)) c.fail_at(p, "predicate names must start with an uppercase letter");
      c.expect('(');
      Pos vp = c.pos();
      std::string v = c.ident("a logical variable");
      if (!is_lower(v)) c.fail_at(vp, "count observations need a logical variable argument");
      note_lvar(v, vp);
      c.expect(')');
      note_arity(pred, 1, p, c);
      c.expect('=');
      Pos np = c.pos();
      std::int64_t n = c.integer("a count");
      if (n < 0) c.fail_at(np, "counts must be nonnegative");
      c.expect_end();
      out_.observations.emplace_back(CountObservation{pred, v, n});
      return;
    }
    Prv prv = parse_prv(c, false);
    c.expect('=');
    Pos vp = c.pos();
    std::string v = c.ident("true or false");
    if (v != "true" && v != "false") c.fail_at(vp, "expected true or false");
    c.expect_end();
    out_.observations.emplace_back(GroundObservation{prv, v == "true"});
  }

  void check_lvars() {
    for (const auto& [v, p] : lvar_uses_) {
      if (!pops_.count(v)) {
        throw ParseError(p.line, p.col, "logical variable '" + v + "' has no population");
      }
    }
  }

  ModelFile out_;
  std::map<std::string, Population> pops_;
  std::vector<WeightedFormula> wfs_;
  std::vector<Prv> extra_prvs_;
  std::map<std::string, std::size_t> arity_;
  std::vector<std::pair<std::string, Pos>> lvar_uses_;

 public:
  const std::vector<Prv>& extra_prvs() const { return extra_prvs_; }
};

}  // namespace

ModelFile parse_model(std::string_view text) {
  Parser p;
  ModelFile f = p.run(text);
  // A literal like `A & !A` normalizes to False but A is still a variable.
  for (const auto& prv : p.extra_prvs()) f.mln.prvs.push_back(prv);
  f.mln.sync_prvs();
  return f;
}

ModelFile parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

void override_populations(ModelFile& f, const std::map<std::string, std::int64_t>& sizes) {
  for (const auto& [name, n] : sizes) {
    auto it = f.mln.populations.find(name);
    if (it == f.mln.populations.end()) {
      throw ModelError("--pop names unknown population '" + name + "'");
    }
    if (n < 0) throw ModelError("population size for '" + name + "' must be nonnegative");
    it->second = Population(name, SizeExpr(n));
  }
}

}  // namespace liftc
