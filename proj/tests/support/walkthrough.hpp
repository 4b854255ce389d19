#pragma once

#include <string>
#include <vector>

#include "liftc/ir.hpp"

namespace liftc::testing {

// Checks the compiled form of the two-formula movie model (|x| = 5,
// |m| = 2, order S, T, R):
//   v1 = pow(v2, 5)
//   v2 accumulates Choose(2, i) * v3 over i in 0..2
//   v3 = pow(2, 2 - i) * v4,  v4 = a * b
// with loops nested exactly two deep. Returns the failed expectations.
std::vector<std::string> walkthrough_mismatches(const ir::Program& p);

}  // namespace liftc::testing
