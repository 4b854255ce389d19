#pragma once

#include <compare>
#include <string>
#include <vector>

#include "liftc/mln.hpp"
#include "liftc/size_expr.hpp"

namespace liftc {

// Equal keys mean the MLNs are identical up to renaming of logical variables
// and constants and reordering of formulas and literals. Predicate names,
// signs, weights and population sizes are all part of the key.
struct CanonicalKey {
  std::string bytes;

  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
};

// Size-free canonical structure of an MLN.
//
// `mln` is the representative: populations renamed p0..pk with symbolic
// sizes N0..Nk, constants renamed C0..Cj, formulas sorted. It is a function
// of `structure` alone, so two inputs with the same structure string get the
// identical representative. `sizes[k]` is the input's size for slot pk.
struct CanonicalForm {
  std::string structure;
  MLN mln;
  std::vector<SizeExpr> sizes;
};

CanonicalForm canonical_form(const MLN& m);
CanonicalKey canonicalize(const MLN& m);

// Slot naming used by canonical representatives.
std::string canonical_population_name(std::size_t slot);
std::string canonical_size_symbol(std::size_t slot);

}  // namespace liftc
