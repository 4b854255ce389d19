#include "liftc/toolchain.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftc/errors.hpp"

namespace liftc {

namespace fs = std::filesystem;

namespace {

std::string quote(const fs::path& p) {
  std::string out = "'";
  for (char c : p.string()) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos)) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Shell {
  int status;
  double seconds;
};

Shell run_shell(const std::string& cmd) {
  auto t0 = std::chrono::steady_clock::now();
  int raw = std::system(cmd.c_str());
  auto t1 = std::chrono::steady_clock::now();
  int status = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));
  return {status, std::chrono::duration<double>(t1 - t0).count()};
}

}  // namespace

ToolchainConfig ToolchainConfig::from_env() {
  ToolchainConfig cfg;
  if (const char* t = std::getenv("LIFTC_TOOLCHAIN"); t && *t) cfg.command = t;
  return cfg;
}

ScratchDir::ScratchDir(const ToolchainConfig& cfg) : keep_(cfg.keep_scratch) {
  fs::path root = cfg.scratch_root.empty() ? fs::temp_directory_path() : cfg.scratch_root;
  fs::create_directories(root);
  std::string tmpl = (root / "liftc-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw ToolchainError("cannot create scratch directory under " + root.string());
  path_ = buf.data();
}

ScratchDir::~ScratchDir() {
  if (keep_) return;
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path build_program(const std::string& source, const ToolchainConfig& cfg, const fs::path& dir,
                       double* seconds) {
  const fs::path src = dir / "program.cpp";
  const fs::path exe = dir / "program";
  const fs::path log = dir / "compile.log";
  {
    std::ofstream out(src, std::ios::binary);
    out << source;
    if (!out) throw ToolchainError("cannot write " + src.string());
  }
  std::string cmd = cfg.command;
  replace_all(cmd, "{opt}", cfg.optimize ? cfg.opt_flag : "");
  replace_all(cmd, "{out}", quote(exe));
  replace_all(cmd, "{src}", quote(src));
  Shell r = run_shell(cmd + " > " + quote(log) + " 2>&1");
  if (seconds) *seconds = r.seconds;
  if (r.status != 0 || !fs::exists(exe)) {
    throw ToolchainError("toolchain command failed with status " + std::to_string(r.status) +
                             ": " + cmd,
                         read_file(log));
  }
  return exe;
}

PartitionValue parse_contract_line(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tag;
  std::string number;
  std::string extra;
  if (!(in >> tag >> number) || (in >> extra) || (tag != "Z" && tag != "lnZ")) {
    throw ToolchainError("unexpected program output", std::string(text));
  }
  char* end = nullptr;
  double v = std::strtod(number.c_str(), &end);
  if (end == number.c_str() || *end != '\0') {
    throw ToolchainError("unparsable value in program output", std::string(text));
  }
  if (tag == "lnZ") return PartitionValue::log_space(v);
  if (!(v >= 0.0) || std::isinf(v)) throw NumericError("program reported Z = " + number);
  return PartitionValue::linear(v);
}

PartitionValue run_program(const fs::path& exe, double* seconds) {
  const fs::path out = exe.parent_path() / "run.out";
  const fs::path err = exe.parent_path() / "run.err";
  Shell r = run_shell(quote(exe) + " > " + quote(out) + " 2> " + quote(err));
  if (seconds) *seconds = r.seconds;
  if (r.status == 3) throw NumericError("compiled program: " + read_file(err));
  if (r.status != 0) {
    throw ToolchainError("compiled program exited with status " + std::to_string(r.status),
                         read_file(err));
  }
  return parse_contract_line(read_file(out));
}

BuildResult build_and_run(const std::string& source, const ToolchainConfig& cfg) {
  ScratchDir dir(cfg);
  BuildResult r;
  const fs::path exe = build_program(source, cfg, dir.path(), &r.compile_seconds);
  r.value = run_program(exe, &r.run_seconds);
  return r;
}

}  // namespace liftc
