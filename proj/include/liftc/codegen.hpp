#pragma once

#include "liftc/ir.hpp"
#include "liftc/mln.hpp"
#include "liftc/planner.hpp"

namespace liftc {

struct CompileStats {
  std::size_t shapes = 0;
  std::size_t subroutines = 0;
};

// Symbolically run the rule engine on m (shattered, constant sizes) and
// record the computation as a program. Variables are v1, v2, ... in
// generation order; loop indices are i1, i2, ...
//
// A shape becomes a memoized subroutine when it is reached from more than
// one place, or when it contains a loop and sits inside a loop whose index
// it does not depend on. Shapes whose evaluation grounds a population are
// always inlined.
ir::Program compile(const MLN& m, const CaseAnalysisOrder& order, CompileStats* stats = nullptr);
ir::Program compile(Planner& planner, const MLN& m, CompileStats* stats = nullptr);

// Specialization of subroutine parameters that are the same constant at
// every call site, constant folding, single-use copy propagation within a
// scope and dead assignment removal. Floating-point operations are never reassociated, so
// linear-space results are bit-identical before and after.
ir::Program prune(const ir::Program& p);

}  // namespace liftc
