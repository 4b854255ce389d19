#pragma once

#include <cstdint>

#include "liftc/ir.hpp"
#include "liftc/numeric.hpp"

namespace liftc {

struct InterpretStats {
  std::uint64_t calls = 0;
  std::uint64_t memo_hits = 0;
};

// Direct execution of an IR program. Arithmetic follows the emitted C++
// operation for operation, so Linear results match a compiled build bit for
// bit on the same platform. Throws NumericError on a non-finite linear
// result or a NaN log result.
PartitionValue interpret(const ir::Program& p, NumericMode mode, InterpretStats* stats = nullptr);

}  // namespace liftc
