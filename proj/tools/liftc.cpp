// liftc: partition functions of Markov logic networks by lifted inference,
// either evaluated directly or compiled to a standalone C++ program.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "liftc/bench.hpp"
#include "liftc/codegen.hpp"
#include "liftc/emit.hpp"
#include "liftc/engine.hpp"
#include "liftc/errors.hpp"
#include "liftc/heuristics.hpp"
#include "liftc/interpret.hpp"
#include "liftc/oracle.hpp"
#include "liftc/parser.hpp"
#include "liftc/shatter.hpp"
#include "liftc/toolchain.hpp"

namespace {

using namespace liftc;

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kNumeric = 3, kToolchain = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::vector<std::string> pops;
  std::string numeric = "double";
  std::string order = "minloops";
  std::size_t budget = 200;
  std::uint64_t seed = 0;
  bool prune = false;
  bool opt = true;
  bool stats = false;
  bool force = false;
  std::string out;
  std::string csv;
  std::string bench_pops;
  std::string modes = "interpret-ir,compiled,compiled-optimized";
  std::string network;
  int repeat = 1;
  int jobs = 1;
  std::string toolchain;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::int64_t parse_size(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || v < 0) throw UsageError("invalid " + what + " '" + s + "'");
  return v;
}

ModelFile load(const Options& o) {
  ModelFile f = parse_model_file(o.file);
  std::map<std::string, std::int64_t> sizes;
  for (const auto& p : o.pops) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--pop expects <lvar>=<n>, got '" + p + "'");
    sizes[p.substr(0, eq)] = parse_size(p.substr(eq + 1), "population size");
  }
  for (const auto& [name, n] : sizes) {
    if (!f.mln.populations.count(name)) throw UsageError("unknown population '" + name + "'");
  }
  override_populations(f, sizes);
  return f;
}

NumericMode numeric_mode(const Options& o) {
  if (o.numeric == "double") return NumericMode::Linear;
  if (o.numeric == "log") return NumericMode::LogSpace;
  throw UsageError("--numeric must be double or log");
}

OrderSpec order_spec(const Options& o) {
  OrderSpec spec;
  try {
    spec = OrderSpec::parse(o.order);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  spec.budget = o.budget;
  spec.seed = o.seed;
  return spec;
}

void print_value(const PartitionValue& v, NumericMode mode) {
  if (mode == NumericMode::Linear) {
    std::printf("Z %.17g\n", v.as_linear());
  } else {
    std::printf("lnZ %.17g\n", v.as_log());
  }
}

int cmd_ground(const Options& o) {
  ModelFile f = load(o);
  OracleOptions opts;
  opts.force = o.force;
  // Evidence is applied by conditioning; the conditioned model is then
  // enumerated world by world.
  const PartitionValue z = f.observations.empty()
                               ? ground_partition(f.mln, opts)
                               : ground_partition(shatter(f.mln, f.observations), opts);
  std::printf("Z %.17g\nlnZ %.17g\n", z.as_linear(), z.as_log());
  return kOk;
}

int cmd_eval(const Options& o) {
  ModelFile f = load(o);
  const NumericMode mode = numeric_mode(o);
  MLN m = shatter(f.mln, f.observations);
  const CaseAnalysisOrder order = select_order(m, order_spec(o));
  EngineStats st;
  PartitionValue z = lifted_Z(m, order, mode, &st);
  print_value(z, mode);
  if (o.stats) {
    std::printf("cache_hits %llu\ncache_misses %llu\nrule_applications %llu\n",
                static_cast<unsigned long long>(st.cache_hits),
                static_cast<unsigned long long>(st.cache_misses),
                static_cast<unsigned long long>(st.rule_applications));
  }
  return kOk;
}

struct Generated {
  ir::Program program;
  CompileStats stats;
  CaseAnalysisOrder order;
  double seconds = 0.0;
};

Generated generate(const Options& o) {
  ModelFile f = load(o);
  auto t0 = Clock::now();
  Generated g;
  MLN m = shatter(f.mln, f.observations);
  g.order = select_order(m, order_spec(o));
  g.program = compile(m, g.order, &g.stats);
  if (o.prune) g.program = prune(g.program);
  g.seconds = since(t0);
  return g;
}

void print_stats(const Generated& g) {
  std::fprintf(stderr, "order");
  for (const auto& p : g.order) std::fprintf(stderr, " %s", p.c_str());
  std::fprintf(stderr, "\nshapes %zu\nsubroutines %zu\nstatements %zu\nloop_depth %zu\n",
               g.stats.shapes, g.program.subroutines.size(), ir::statement_count(g.program),
               ir::loop_depth(g.program));
}

int cmd_compile(const Options& o) {
  if (o.out.empty()) throw UsageError("compile requires -o <path>");
  Generated g = generate(o);
  EmitterConfig ec;
  ec.mode = numeric_mode(o);
  const std::string src = emit(g.program, ec);
  std::ofstream out(o.out, std::ios::binary);
  out << src;
  if (!out) throw UsageError("cannot write " + o.out);
  if (o.stats) print_stats(g);
  return kOk;
}

ToolchainConfig toolchain(const Options& o) {
  ToolchainConfig tc = ToolchainConfig::from_env();
  if (!o.toolchain.empty()) tc.command = o.toolchain;
  tc.optimize = o.opt;
  return tc;
}

int cmd_run(const Options& o) {
  Generated g = generate(o);
  EmitterConfig ec;
  ec.mode = numeric_mode(o);
  ToolchainConfig tc = toolchain(o);
  ScratchDir dir(tc);
  double cc = 0.0;
  const auto exe = build_program(emit(g.program, ec), tc, dir.path(), &cc);
  std::vector<double> runs;
  PartitionValue z = PartitionValue::linear(0.0);
  for (int k = 0; k < std::max(1, o.repeat); ++k) {
    double s = 0.0;
    z = run_program(exe, &s);
    runs.push_back(s);
  }
  std::sort(runs.begin(), runs.end());
  print_value(z, ec.mode);
  std::printf("gen_s %.6f\ncc_s %.6f\nrun_s %.6f\n", g.seconds, cc, runs[runs.size() / 2]);
  if (o.stats) print_stats(g);
  return kOk;
}

int cmd_bench(const Options& o) {
  ModelFile f = load(o);
  BenchConfig cfg;
  cfg.network = o.network;
  if (cfg.network.empty()) {
    cfg.network = o.file;
    auto slash = cfg.network.find_last_of('/');
    if (slash != std::string::npos) cfg.network = cfg.network.substr(slash + 1);
    auto dot = cfg.network.find_last_of('.');
    if (dot != std::string::npos && dot > 0) cfg.network = cfg.network.substr(0, dot);
  }
  if (o.bench_pops.empty()) throw UsageError("bench requires --pops n1,n2,...");
  for (const auto& p : split(o.bench_pops, ',')) cfg.pops.push_back(parse_size(p, "size in --pops"));
  for (const auto& m : split(o.modes, ',')) {
    auto mode = parse_bench_mode(m);
    if (!mode) throw UsageError("unknown mode '" + m + "'");
    cfg.modes.push_back(*mode);
  }
  cfg.order = order_spec(o);
  cfg.prune = o.prune;
  cfg.repeat = o.repeat;
  cfg.jobs = o.jobs;
  cfg.force_oracle = o.force;
  cfg.toolchain = toolchain(o);
  const std::string csv = bench_csv(run_bench(f, cfg));
  if (o.csv.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(o.csv, std::ios::binary);
    out << csv;
    if (!out) throw UsageError("cannot write " + o.csv);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted partition functions of Markov logic networks"};
  app.require_subcommand(1);
  Options o;

  auto add_model = [&](CLI::App* c) {
    c->add_option("file", o.file, "model file")->required();
    c->add_option("--pop", o.pops, "population size override <lvar>=<n> (repeatable)");
  };
  auto add_order = [&](CLI::App* c) {
    c->add_option("--order", o.order, "greedy, minloops or a comma-separated predicate list")
        ->capture_default_str();
    c->add_option("--search-budget", o.budget, "local search iterations for minloops")
        ->capture_default_str();
    c->add_option("--seed", o.seed, "local search seed")->capture_default_str();
  };
  auto add_numeric = [&](CLI::App* c) {
    c->add_option("--numeric", o.numeric, "double or log")->capture_default_str();
  };
  auto add_build = [&](CLI::App* c) {
    c->add_flag("--opt,!--no-opt", o.opt, "pass the optimization flag to the toolchain");
    c->add_option("--toolchain", o.toolchain,
                  "compiler command template with {opt} {out} {src} (default: $LIFTC_TOOLCHAIN)");
  };

  auto* ground = app.add_subcommand("ground", "Z by enumerating all worlds");
  add_model(ground);
  ground->add_flag("--force", o.force, "enumerate beyond the default size bound");

  auto* eval = app.add_subcommand("eval", "Z by lifted inference");
  add_model(eval);
  add_order(eval);
  add_numeric(eval);
  eval->add_flag("--stats", o.stats, "print cache statistics");

  auto* compile_cmd = app.add_subcommand("compile", "write a C++ program computing Z");
  add_model(compile_cmd);
  add_order(compile_cmd);
  add_numeric(compile_cmd);
  compile_cmd->add_option("-o,--output", o.out, "output source path")->required();
  compile_cmd->add_flag("--prune", o.prune, "simplify the program before emission");
  compile_cmd->add_flag("--stats", o.stats, "print program statistics to stderr");

  auto* run = app.add_subcommand("run", "compile, build and execute");
  add_model(run);
  add_order(run);
  add_numeric(run);
  add_build(run);
  run->add_flag("--prune", o.prune, "simplify the program before emission");
  run->add_flag("--stats", o.stats, "print program statistics to stderr");
  run->add_option("--repeat", o.repeat, "executions; the median time is reported")
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "time evaluation modes over population sizes");
  add_model(bench);
  add_order(bench);
  add_build(bench);
  bench->add_option("--pops", o.bench_pops, "comma-separated sizes given to every population")
      ->required();
  bench->add_option("--modes", o.modes,
                    "comma-separated: oracle, interpret-ir, compiled, compiled-optimized")
      ->capture_default_str();
  bench->add_option("--csv", o.csv, "output path (default: stdout)");
  bench->add_option("--network", o.network, "network label (default: file stem)");
  bench->add_option("--repeat", o.repeat, "executions per cell; the median is reported")
      ->capture_default_str();
  bench->add_option("--jobs", o.jobs, "cells run in parallel")->capture_default_str();
  bench->add_flag("--prune", o.prune, "simplify programs before interpretation and emission");
  bench->add_flag("--force", o.force, "let the oracle enumerate beyond its default bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*ground) return cmd_ground(o);
    if (*eval) return cmd_eval(o);
    if (*compile_cmd) return cmd_compile(o);
    if (*run) return cmd_run(o);
    if (*bench) return cmd_bench(o);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "%s:%s\n", o.file.c_str(), e.what());
    return kParse;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const ToolchainError& e) {
    std::fprintf(stderr, "toolchain error: %s\n", e.what());
    if (!e.diagnostics().empty()) std::fprintf(stderr, "%s\n", e.diagnostics().c_str());
    return kToolchain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
