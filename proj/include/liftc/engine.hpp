#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "liftc/mln.hpp"
#include "liftc/numeric.hpp"
#include "liftc/planner.hpp"
#include "liftc/size_expr.hpp"

namespace liftc {

struct EngineStats {
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t rule_applications = 0;
};

// Numeric evaluator over planned shapes. Results are memoized on
// (shape, concrete slot sizes); a shape stops being memoized once it has
// missed 65536 times without a single hit.
class LiftedEngine {
 public:
  LiftedEngine(Planner& planner, NumericMode mode, bool use_cache = true);

  // Z of m (all sizes constant), shattering already applied.
  PartitionValue evaluate(const MLN& m);
  // Raw value (linear or natural log per mode) of a shape at given sizes.
  double evaluate(int sid, std::span<const std::int64_t> sizes);

  const EngineStats& stats() const { return stats_; }
  NumericMode mode() const { return mode_; }

 private:
  struct Compiled {
    std::vector<std::vector<SlotPolynomial>> child_args;
    SlotPolynomial amount;
    std::vector<std::pair<double, SlotPolynomial>> terms;
  };
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const noexcept;
  };

  const Compiled& compiled(int sid);
  double compute(int sid, std::span<const std::int64_t> sizes);
  double child_value(int sid, const std::vector<SlotPolynomial>& args,
                     std::span<const std::int64_t> env);

  struct Usage {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    bool off = false;
  };

  Planner& planner_;
  NumericMode mode_;
  bool use_cache_;
  std::vector<std::unique_ptr<Compiled>> compiled_;
  std::unordered_map<std::vector<std::int64_t>, double, KeyHash> cache_;
  std::vector<std::int64_t> key_;
  std::vector<Usage> usage_;
  std::size_t depth_ = 0;
  EngineStats stats_;
};

// Z of an already shattered MLN with constant sizes.
PartitionValue lifted_Z(const MLN& m, const CaseAnalysisOrder& order, NumericMode mode,
                        EngineStats* stats = nullptr, bool use_cache = true);

}  // namespace liftc
