#include "liftc/engine.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "liftc/errors.hpp"

namespace liftc {

namespace {

constexpr std::size_t kMaxDepth = 20000;
constexpr std::uint64_t kProbeMisses = 1 << 16;

}  // namespace

std::size_t LiftedEngine::KeyHash::operator()(const std::vector<std::int64_t>& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int64_t v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

LiftedEngine::LiftedEngine(Planner& planner, NumericMode mode, bool use_cache)
    : planner_(planner), mode_(mode), use_cache_(use_cache) {}

const LiftedEngine::Compiled& LiftedEngine::compiled(int sid) {
  const auto idx = static_cast<std::size_t>(sid);
  if (idx >= compiled_.size()) compiled_.resize(idx + 1);
  if (!compiled_[idx]) {
    const Plan& p = planner_.plan(sid);
    const auto slots = slot_symbols(planner_.num_slots(sid));
    auto c = std::make_unique<Compiled>();
    for (const auto& ch : p.children) {
      std::vector<SlotPolynomial> args;
      for (const auto& a : ch.args) args.emplace_back(a, slots);
      c->child_args.push_back(std::move(args));
    }
    c->amount = SlotPolynomial(p.amount, slots);
    for (const auto& [w, count] : p.terms) c->terms.emplace_back(w, SlotPolynomial(count, slots));
    compiled_[idx] = std::move(c);
  }
  return *compiled_[idx];
}

double LiftedEngine::child_value(int sid, const std::vector<SlotPolynomial>& args,
                                 std::span<const std::int64_t> env) {
  std::int64_t buf[16];
  std::vector<std::int64_t> heap;
  std::int64_t* sizes = buf;
  if (args.size() > 16) {
    heap.resize(args.size());
    sizes = heap.data();
  }
  for (std::size_t k = 0; k < args.size(); ++k) sizes[k] = args[k](env);
  return evaluate(sid, std::span<const std::int64_t>(sizes, args.size()));
}

double LiftedEngine::evaluate(int sid, std::span<const std::int64_t> sizes) {
  // Scaling, product and leaf nodes are cheap and sit under loops at every
  // (index, size) pair; caching them would cost O(n^2) entries.
  const PlanKind kind = planner_.plan(sid).kind;
  if (kind == PlanKind::Simplify || kind == PlanKind::TrueEval || kind == PlanKind::Components) {
    return compute(sid, sizes);
  }
  const auto idx = static_cast<std::size_t>(sid);
  if (idx >= usage_.size()) usage_.resize(idx + 1);
  Usage& u = usage_[idx];
  if (!use_cache_ || u.off) {
    ++stats_.cache_misses;
    return compute(sid, sizes);
  }
  key_.assign(1, sid);
  key_.insert(key_.end(), sizes.begin(), sizes.end());
  if (auto it = cache_.find(key_); it != cache_.end()) {
    if (std::isnan(it->second)) {
      throw std::logic_error("rule selection made no progress on shape " +
                             planner_.structure(sid));
    }
    ++stats_.cache_hits;
    ++u.hits;
    return it->second;
  }
  ++stats_.cache_misses;
  // Shapes whose states are each visited once (loop bodies indexed by every
  // enclosing index) would fill the cache without ever hitting.
  if (++u.misses >= kProbeMisses && u.hits == 0) u.off = true;
  double& slot = cache_.emplace(key_, std::numeric_limits<double>::quiet_NaN()).first->second;
  const double v = compute(sid, sizes);
  slot = v;
  return v;
}

double LiftedEngine::compute(int sid, std::span<const std::int64_t> sizes) {
  if (++depth_ > kMaxDepth) {
    depth_ = 0;
    throw std::logic_error("rule recursion exceeded depth bound; no progress");
  }
  ++stats_.rule_applications;
  const Plan& p = planner_.plan(sid);
  const Compiled& c = compiled(sid);
  const bool lin = mode_ == NumericMode::Linear;
  double v = 0.0;

  switch (p.kind) {
    case PlanKind::TrueEval: {
      if (c.terms.empty()) {
        v = lin ? 1.0 : 0.0;
        break;
      }
      for (std::size_t k = 0; k < c.terms.size(); ++k) {
        const double x = c.terms[k].first * static_cast<double>(c.terms[k].second(sizes));
        const double t = lin ? std::exp(x) : x;
        v = k == 0 ? t : (lin ? v * t : v + t);
      }
      break;
    }
    case PlanKind::Simplify: {
      const double e = static_cast<double>(c.amount(sizes));
      const double child = child_value(p.children[0].sid, c.child_args[0], sizes);
      v = lin ? std::pow(2.0, e) * child : e * std::log(2.0) + child;
      break;
    }
    case PlanKind::Components: {
      for (std::size_t k = 0; k < p.children.size(); ++k) {
        const double child = child_value(p.children[k].sid, c.child_args[k], sizes);
        v = k == 0 ? child : (lin ? v * child : v + child);
      }
      break;
    }
    case PlanKind::Decomposer: {
      const double s = static_cast<double>(c.amount(sizes));
      const double child = child_value(p.children[0].sid, c.child_args[0], sizes);
      v = lin ? std::pow(child, s) : s * child;
      break;
    }
    case PlanKind::GroundCase: {
      const double t = child_value(p.children[0].sid, c.child_args[0], sizes);
      const double f = child_value(p.children[1].sid, c.child_args[1], sizes);
      v = lin ? t + f : log_add(t, f);
      break;
    }
    case PlanKind::LiftedCase: {
      const std::int64_t n = c.amount(sizes);
      std::vector<std::int64_t> env(sizes.begin(), sizes.end());
      env.push_back(0);
      v = lin ? 0.0 : -std::numeric_limits<double>::infinity();
      for (std::int64_t i = 0; i <= n; ++i) {
        env.back() = i;
        const double child = child_value(p.children[0].sid, c.child_args[0], env);
        v = lin ? v + choose(n, i) * child : log_add(v, log_choose(n, i) + child);
      }
      break;
    }
    case PlanKind::GroundLVar: {
      const PlanChild& g = planner_.ground_child(sid, c.amount(sizes));
      const auto slots = slot_symbols(planner_.num_slots(sid));
      std::vector<SlotPolynomial> args;
      for (const auto& a : g.args) args.emplace_back(a, slots);
      v = child_value(g.sid, args, sizes);
      break;
    }
  }
  --depth_;
  if (lin ? !std::isfinite(v) : std::isnan(v)) {
    depth_ = 0;
    throw NumericError(lin ? "linear-mode overflow: an intermediate value is not finite "
                             "(use log-space evaluation)"
                           : "log-space evaluation produced NaN");
  }
  return v;
}

PartitionValue LiftedEngine::evaluate(const MLN& m) {
  if (!m.all_sizes_constant()) throw ModelError("evaluation needs concrete population sizes");
  auto [sid, sizes] = planner_.intern(m);
  std::vector<std::int64_t> concrete;
  for (const auto& s : sizes) concrete.push_back(*s.constant());
  const double v = evaluate(sid, concrete);
  return mode_ == NumericMode::Linear ? PartitionValue::linear(v) : PartitionValue::log_space(v);
}

PartitionValue lifted_Z(const MLN& m, const CaseAnalysisOrder& order, NumericMode mode,
                        EngineStats* stats, bool use_cache) {
  Planner planner(order);
  LiftedEngine engine(planner, mode, use_cache);
  PartitionValue z = engine.evaluate(m);
  if (stats) *stats = engine.stats();
  return z;
}

}  // namespace liftc
