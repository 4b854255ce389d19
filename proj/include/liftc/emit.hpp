#pragma once

#include <string>

#include "liftc/ir.hpp"
#include "liftc/numeric.hpp"

namespace liftc {

// Dialects: "cpp" (numeric mode chosen by `mode`) and "cpp-log" (always
// log space).
struct EmitterConfig {
  NumericMode mode = NumericMode::Linear;
  int precision = 17;
  std::string dialect = "cpp";
};

// Standalone C++ source computing p. The program takes no input and prints
// `Z <value>` or `lnZ <value>`. A non-finite linear result is reported on
// stderr with exit status 3. Throws std::invalid_argument for an unknown
// dialect.
std::string emit(const ir::Program& p, const EmitterConfig& cfg = {});

}  // namespace liftc
