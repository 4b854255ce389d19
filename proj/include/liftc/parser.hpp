#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "liftc/mln.hpp"
#include "liftc/shatter.hpp"

namespace liftc {

// A parsed model file: the MLN plus its evidence.
struct ModelFile {
  MLN mln;
  std::vector<Observation> observations;
};

// Line-oriented model format:
//
//   # comment
//   population x 5
//   wf 1.2 : R(x,m) & !S(x,m)
//   wf 0.5 {x,m} : T(x)          (explicit L, may exceed the formula's lvars)
//   wf 2.0 : true
//   observe T(X1) = true
//   observe count T(x) = 2
//
// Throws ParseError with a line:column position on malformed input, unknown
// logical variables and arity clashes; ModelError on other semantic problems.
ModelFile parse_model(std::string_view text);
ModelFile parse_model_file(const std::string& path);

// Replace population sizes (and drop any listed members) before shattering.
void override_populations(ModelFile& f, const std::map<std::string, std::int64_t>& sizes);

}  // namespace liftc
