#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liftc/heuristics.hpp"
#include "liftc/parser.hpp"
#include "liftc/toolchain.hpp"

namespace liftc {

enum class BenchMode { Oracle, InterpretIR, Compiled, CompiledOptimized };

const char* bench_mode_name(BenchMode m);
// Accepts oracle, interpret-ir, compiled, compiled-optimized.
std::optional<BenchMode> parse_bench_mode(const std::string& s);

struct BenchRecord {
  std::string network;
  std::int64_t pop = 0;
  BenchMode mode = BenchMode::InterpretIR;
  double gen_s = 0.0;  // shatter, order selection, compile and prune
  double cc_s = 0.0;   // external toolchain
  double run_s = 0.0;  // median execution time
  double lnZ = 0.0;
  std::string error;   // non-empty when the cell failed
};

struct BenchConfig {
  std::string network;
  std::vector<std::int64_t> pops;  // every population gets this size
  std::vector<BenchMode> modes;
  OrderSpec order;
  bool prune = true;
  int repeat = 1;
  int jobs = 1;
  bool force_oracle = false;
  ToolchainConfig toolchain = ToolchainConfig::from_env();
};

// One record per (pop, mode), in that nesting order. Cell failures are
// recorded in BenchRecord::error. Throws std::invalid_argument for an empty
// size or mode list.
std::vector<BenchRecord> run_bench(const ModelFile& model, const BenchConfig& cfg);

// CSV with header network,pop,mode,gen_s,cc_s,run_s,lnZ,error.
std::string bench_csv(const std::vector<BenchRecord>& rows);

}  // namespace liftc
