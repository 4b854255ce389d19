#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "liftc/numeric.hpp"

namespace liftc {

// External compiler invocation. `command` is a shell template with the
// placeholders {opt}, {out} and {src}; {opt} expands to `opt_flag` when
// `optimize` is set and to nothing otherwise.
struct ToolchainConfig {
  std::string command = "c++ {opt} -o {out} {src}";
  std::string opt_flag = "-O3";
  bool optimize = true;
  // Parent of the per-build scratch directories; empty means the system
  // temporary directory.
  std::filesystem::path scratch_root;
  bool keep_scratch = false;

  // Defaults, with `command` taken from LIFTC_TOOLCHAIN when set.
  static ToolchainConfig from_env();
};

struct BuildResult {
  PartitionValue value = PartitionValue::linear(0.0);
  double compile_seconds = 0.0;
  double run_seconds = 0.0;
};

// Owns a fresh scratch directory; removed on destruction unless kept.
class ScratchDir {
 public:
  explicit ScratchDir(const ToolchainConfig& cfg);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  bool keep_;
};

// Writes `source` into dir, compiles it and returns the executable path.
// Throws ToolchainError with the compiler's output on failure.
std::filesystem::path build_program(const std::string& source, const ToolchainConfig& cfg,
                                    const std::filesystem::path& dir, double* seconds = nullptr);

// Runs a built program and parses its contract line. Exit status 3 raises
// NumericError; other failures raise ToolchainError.
PartitionValue run_program(const std::filesystem::path& exe, double* seconds = nullptr);

// Parses `Z <value>` or `lnZ <value>`.
PartitionValue parse_contract_line(std::string_view text);

// build_program + run_program in a private scratch directory.
BuildResult build_and_run(const std::string& source, const ToolchainConfig& cfg);

}  // namespace liftc
