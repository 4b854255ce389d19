#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "liftc/bench.hpp"
#include "liftc/parser.hpp"
#include "random_mln.hpp"

using namespace liftc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(LIFTC_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string corpus(const char* name) { return std::string(LIFTC_CORPUS) + "/" + name; }

double value_of(const std::string& out, const std::string& tag) {
  std::istringstream in(out);
  std::string t;
  while (in >> t) {
    if (t == tag) {
      double v = 0.0;
      in >> v;
      return v;
    }
  }
  throw std::runtime_error("no " + tag + " in output: " + out);
}

class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/liftc-cli-XXXXXX";
    REQUIRE(mkdtemp(tmpl) != nullptr);
    path_ = tmpl;
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    const fs::path p = path_ / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("ground") {
  Run r = cli("ground " + corpus("example1.mln") + " --pop x=1 --pop m=1");
  CHECK(r.status == 0);
  CHECK(value_of(r.out, "Z") == doctest::Approx(13.5967).epsilon(1e-5));
  CHECK(value_of(r.out, "lnZ") == doctest::Approx(std::log(13.596719647741391)).epsilon(1e-12));

  TempDir d;
  r = cli("ground " + d.file("empty.mln", "# nothing\n"));
  CHECK(r.status == 0);
  CHECK(value_of(r.out, "Z") == 1.0);

  r = cli("ground " + d.file("count.mln", "population x 5\nwf 1.0 : T(x)\nobserve count T(x) = 7\n"));
  CHECK(r.status == 1);
  CHECK(r.out.find("outside") != std::string::npos);

  r = cli("ground " + corpus("example1.mln"));
  CHECK(r.status == 1);
  CHECK(r.out.find("exceed") != std::string::npos);

  r = cli("ground " + d.file("bad.mln", "population x 2\nwf 1.0 T(x)\n"));
  CHECK(r.status == 2);
  CHECK(r.out.find(":2:8:") != std::string::npos);

  r = cli("ground " + d.file("obs.mln", "population x 3\nwf 0.4 : T(x) & U(x)\nobserve T(X1) = true\n"));
  CHECK(r.status == 0);
  // T(X1) fixed true: (e^0.4 + 1) for X1 times ((e^0.4 + 1) + 2)^2 for the rest.
  CHECK(value_of(r.out, "Z") ==
        doctest::Approx((std::exp(0.4) + 1) * std::pow(std::exp(0.4) + 3, 2)).epsilon(1e-12));
}

TEST_CASE("eval") {
  const double ground = value_of(cli("ground " + corpus("network2.mln")).out, "Z");
  Run r = cli("eval " + corpus("network2.mln") + " --stats");
  CHECK(r.status == 0);
  CHECK(value_of(r.out, "Z") == doctest::Approx(ground).epsilon(1e-12));
  CHECK(r.out.find("cache_hits") != std::string::npos);
  CHECK(r.out.find("cache_misses") != std::string::npos);

  r = cli("eval " + corpus("network2.mln") + " --numeric log --pop x=5000 --pop m=5000 --order F,D,E,A,B,C");
  CHECK(r.status == 0);
  CHECK(std::isfinite(value_of(r.out, "lnZ")));

  r = cli("eval " + corpus("example1.mln") + " --order S,T");
  CHECK(r.status == 1);
  CHECK(r.out.find("missing predicate") != std::string::npos);

  CHECK(cli("eval " + corpus("example1.mln") + " --numeric decimal").status == 1);
  CHECK(cli("eval " + corpus("example1.mln") + " --pop q=3").status == 1);
  CHECK(cli("eval " + corpus("example1.mln") + " --pop x=-3").status == 1);
  CHECK(cli("eval " + corpus("network2.mln") + " --pop x=100 --pop m=100").status == 3);
  CHECK(cli("frobnicate").status == 1);
}

TEST_CASE("compile") {
  TempDir d;
  const std::string plain = d.file("plain.cpp");
  const std::string pruned = d.file("pruned.cpp");
  const std::string logp = d.file("log.cpp");
  Run a = cli("compile " + corpus("example1.mln") + " --order S,T,R --stats -o " + plain);
  Run b = cli("compile " + corpus("example1.mln") + " --order S,T,R --stats --prune -o " + pruned);
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(value_of(b.out, "statements") <= value_of(a.out, "statements"));
  CHECK(value_of(a.out, "loop_depth") == 2);
  std::ifstream in(plain);
  const std::string src((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(src.find("v1 = pow(v2, (double)(5))") != std::string::npos);
  CHECK(src.find("lc_choose(2, i1)") != std::string::npos);

  REQUIRE(cli("compile " + corpus("example1.mln") + " --numeric log -o " + logp).status == 0);
  std::ifstream lin(logp);
  const std::string lsrc((std::istreambuf_iterator<char>(lin)), std::istreambuf_iterator<char>());
  CHECK(lsrc.find("lnZ") != std::string::npos);

  CHECK(cli("compile " + corpus("example1.mln")).status == 1);
}

TEST_CASE("run") {
  Run r = cli("run " + corpus("example1.mln") + " --pop x=1 --pop m=1 --no-opt");
  CHECK(r.status == 0);
  CHECK(value_of(r.out, "Z") == doctest::Approx(13.596719647741391).epsilon(1e-12));
  CHECK(value_of(r.out, "cc_s") > 0.0);

  r = cli("run " + corpus("example1.mln") + " --no-opt --toolchain '/nonexistent/cc {opt} -o {out} {src}'");
  CHECK(r.status == 4);
  r = cli("run " + corpus("network2.mln") + " --no-opt --pop x=100 --pop m=100 --order F,D,E,A,B,C");
  CHECK(r.status == 3);
}

TEST_CASE("bench command writes CSV") {
  TempDir d;
  const std::string csv = d.file("out.csv");
  Run r = cli("bench " + corpus("network2.mln") + " --pops 10,100 --modes interpret-ir,compiled --no-opt --csv " + csv);
  REQUIRE(r.status == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "network,pop,mode,gen_s,cc_s,run_s,lnZ,error");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("network2,", 0) == 0);
  }
  CHECK(rows == 4);
  CHECK(cli("bench " + corpus("network2.mln") + " --pops 10 --modes warp").status == 1);
}

TEST_CASE("bench harness") {
  const ModelFile f = parse_model_file(corpus("network2.mln"));
  BenchConfig cfg;
  cfg.network = "network2";
  cfg.pops = {2, 10, 100};
  cfg.modes = {BenchMode::Oracle, BenchMode::InterpretIR, BenchMode::Compiled,
               BenchMode::CompiledOptimized};
  cfg.toolchain.opt_flag = "-O1";
  cfg.jobs = 2;
  cfg.repeat = 3;
  const auto rows = run_bench(f, cfg);
  REQUIRE(rows.size() == 12);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].pop == cfg.pops[k / 4]);
    CHECK(rows[k].mode == cfg.modes[k % 4]);
    CHECK(rows[k].gen_s >= 0.0);
    CHECK(rows[k].cc_s >= 0.0);
    CHECK(rows[k].run_s >= 0.0);
  }
  // The oracle only handles the smallest size.
  CHECK(rows[0].error.empty());
  CHECK_FALSE(rows[4].error.empty());
  for (std::size_t base : {0u, 4u, 8u}) {
    const double ref = rows[base + 1].lnZ;
    for (std::size_t k = base; k < base + 4; ++k) {
      if (rows[k].error.empty()) CHECK(testing::close(rows[k].lnZ, ref, 1e-6));
    }
    CHECK(rows[base + 2].lnZ == rows[base + 3].lnZ);
    CHECK(rows[base + 2].cc_s > 0.0);
  }

  const std::string csv = bench_csv(rows);
  CHECK(csv.rfind("network,pop,mode,gen_s,cc_s,run_s,lnZ,error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);

  BenchConfig empty = cfg;
  empty.pops.clear();
  CHECK_THROWS_AS(run_bench(f, empty), std::invalid_argument);
  CHECK(parse_bench_mode("compiled-optimized") == BenchMode::CompiledOptimized);
  CHECK_FALSE(parse_bench_mode("jit"));
}
