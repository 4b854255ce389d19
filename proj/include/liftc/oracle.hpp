#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liftc/mln.hpp"
#include "liftc/numeric.hpp"

namespace liftc {

// Truth assignment over the sorted ground atoms of an MLN.
class World {
 public:
  World(std::vector<std::string> atoms, std::uint64_t bits);

  const std::vector<std::string>& atoms() const { return atoms_; }
  std::uint64_t bits() const { return bits_; }
  // Throws std::out_of_range for an atom outside the world.
  bool value(const std::string& atom) const;
  void set(const std::string& atom, bool v);

 private:
  std::vector<std::string> atoms_;
  std::uint64_t bits_;
};

// All ground atoms (rendered like "R(X1,M2)"), sorted. Every grounding of
// every family and every literal is included.
std::vector<std::string> ground_atoms(const MLN& m);

// World over ground_atoms(m) in which exactly `true_atoms` hold.
World make_world(const MLN& m, const std::vector<std::string>& true_atoms);

// Assignments to `wf.lvars` under which the formula holds in w. Variables of
// L not in the formula multiply the count by their population size.
std::int64_t eta(const MLN& m, const WeightedFormula& wf, const World& w);

// Unnormalized weight prod exp(eta * w) of one world.
PartitionValue world_weight(const MLN& m, const World& w);

struct OracleOptions {
  std::size_t bound = 24;  // maximum number of ground atoms
  bool force = false;
  // Atoms fixed by evidence; they stay in the world but are not summed over.
  std::map<std::string, bool> evidence;
};

// Z by enumeration of all worlds. Throws OracleLimitError above the bound
// unless forced; forcing still refuses more than 62 atoms.
PartitionValue ground_partition(const MLN& m, const OracleOptions& opts = {});

}  // namespace liftc
