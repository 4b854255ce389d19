#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "liftc/parser.hpp"
#include "liftc/planner.hpp"

namespace liftc::testing {

struct RandomSpec {
  int max_predicates = 3;
  int max_arity = 2;
  int max_wfs = 3;
  int max_populations = 2;
  int max_size = 3;
  int max_ground_atoms = 16;
  double empty_population = 0.0;  // chance of a size-0 population
  double constant_arg = 0.0;      // chance a literal argument is a member constant
  double extra_lvar = 0.0;        // chance L carries a variable absent from F
  int max_ground_observations = 0;
};

struct RandomModel {
  std::string text;
  ModelFile file;
  // Ground observations keyed by oracle atom name.
  std::map<std::string, bool> evidence;
};

// Random conjunctive MLN in the model file format. Predicates have fixed
// argument populations; weights lie in [-2, 2].
RandomModel random_model(std::mt19937_64& rng, const RandomSpec& spec = {});

// Uniformly shuffled predicate list of m.
CaseAnalysisOrder random_order(std::mt19937_64& rng, const MLN& m);

bool close(double a, double b, double rel);

}  // namespace liftc::testing
