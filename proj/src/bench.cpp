#include "liftc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "liftc/codegen.hpp"
#include "liftc/emit.hpp"
#include "liftc/interpret.hpp"
#include "liftc/oracle.hpp"
#include "liftc/shatter.hpp"

namespace liftc {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MLN sized_model(const ModelFile& model, std::int64_t pop) {
  ModelFile f = model;
  std::map<std::string, std::int64_t> sizes;
  for (const auto& [name, p] : f.mln.populations) sizes[name] = pop;
  override_populations(f, sizes);
  return shatter(f.mln, f.observations);
}

void run_cell(const ModelFile& model, const BenchConfig& cfg, BenchRecord& r) {
  const int repeat = std::max(1, cfg.repeat);
  try {
    if (r.mode == BenchMode::Oracle) {
      MLN m = sized_model(model, r.pop);
      OracleOptions opts;
      opts.force = cfg.force_oracle;
      std::vector<double> times;
      for (int k = 0; k < repeat; ++k) {
        auto t0 = Clock::now();
        r.lnZ = ground_partition(m, opts).as_log();
        times.push_back(since(t0));
      }
      r.run_s = median(times);
      return;
    }

    auto t0 = Clock::now();
    MLN m = sized_model(model, r.pop);
    ir::Program p = compile(m, select_order(m, cfg.order));
    if (cfg.prune) p = prune(p);
    r.gen_s = since(t0);

    std::vector<double> times;
    if (r.mode == BenchMode::InterpretIR) {
      for (int k = 0; k < repeat; ++k) {
        auto t1 = Clock::now();
        r.lnZ = interpret(p, NumericMode::LogSpace).raw();
        times.push_back(since(t1));
      }
    } else {
      EmitterConfig ec;
      ec.mode = NumericMode::LogSpace;
      ToolchainConfig tc = cfg.toolchain;
      tc.optimize = r.mode == BenchMode::CompiledOptimized;
      ScratchDir dir(tc);
      const auto exe = build_program(emit(p, ec), tc, dir.path(), &r.cc_s);
      for (int k = 0; k < repeat; ++k) {
        double s = 0.0;
        r.lnZ = run_program(exe, &s).as_log();
        times.push_back(s);
      }
    }
    r.run_s = median(times);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

const char* bench_mode_name(BenchMode m) {
  switch (m) {
    case BenchMode::Oracle: return "oracle";
    case BenchMode::InterpretIR: return "interpret-ir";
    case BenchMode::Compiled: return "compiled";
    case BenchMode::CompiledOptimized: return "compiled-optimized";
  }
  return "?";
}

std::optional<BenchMode> parse_bench_mode(const std::string& s) {
  for (auto m : {BenchMode::Oracle, BenchMode::InterpretIR, BenchMode::Compiled,
                 BenchMode::CompiledOptimized}) {
    if (s == bench_mode_name(m)) return m;
  }
  return std::nullopt;
}

std::vector<BenchRecord> run_bench(const ModelFile& model, const BenchConfig& cfg) {
  if (cfg.pops.empty()) throw std::invalid_argument("no population sizes given");
  if (cfg.modes.empty()) throw std::invalid_argument("no benchmark modes given");
  std::vector<BenchRecord> rows;
  for (std::int64_t pop : cfg.pops) {
    if (pop < 0) throw std::invalid_argument("population sizes must be nonnegative");
    for (BenchMode mode : cfg.modes) {
      BenchRecord r;
      r.network = cfg.network;
      r.pop = pop;
      r.mode = mode;
      rows.push_back(std::move(r));
    }
  }
  const int jobs = std::clamp(cfg.jobs, 1, static_cast<int>(rows.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) run_cell(model, cfg, rows[i]);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string bench_csv(const std::vector<BenchRecord>& rows) {
  std::ostringstream os;
  os << "network,pop,mode,gen_s,cc_s,run_s,lnZ,error\n";
  char buf[64];
  for (const auto& r : rows) {
    os << csv_field(r.network) << ',' << r.pop << ',' << bench_mode_name(r.mode);
    for (double t : {r.gen_s, r.cc_s, r.run_s}) {
      std::snprintf(buf, sizeof buf, ",%.6f", t);
      os << buf;
    }
    if (r.error.empty()) {
      std::snprintf(buf, sizeof buf, ",%.17g,", r.lnZ);
      os << buf << '\n';
    } else {
      os << ",," << csv_field(r.error) << '\n';
    }
  }
  return os.str();
}

}  // namespace liftc
