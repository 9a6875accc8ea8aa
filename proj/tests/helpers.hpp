#pragma once

// Shared helpers for the test suites: seeded random generators for types and
// small utilities.  The generators are deliberately simple; coverage comes
// from running them many times with a fixed seed.

#include <random>
#include <string>
#include <vector>

#include "retracts/types.hpp"

namespace testgen {

using retracts::Type;

// Random type with exactly `atoms` atom occurrences drawn from `alphabet`.
inline Type random_type(std::mt19937& rng, int atoms, const std::vector<std::string>& alphabet) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  if (atoms <= 1) return Type::atom(alphabet[pick(rng)]);
  // split atoms-1 among a random number of arguments
  int budget = atoms - 1;
  std::uniform_int_distribution<int> nargs_dist(1, std::min(3, budget));
  int nargs = nargs_dist(rng);
  std::vector<int> sizes(nargs, 1);
  budget -= nargs;
  std::uniform_int_distribution<int> which(0, nargs - 1);
  while (budget > 0) {
    sizes[which(rng)] += 1;
    --budget;
  }
  std::vector<Type> args;
  for (int s : sizes) args.push_back(random_type(rng, s, alphabet));
  return Type::arrow_chain(args, Type::atom(alphabet[pick(rng)]));
}

// Random permutation of the argument lists of t, at every level: produces a
// type isomorphic to t but usually syntactically different.
inline Type shuffle_args(std::mt19937& rng, const Type& t) {
  if (t.is_atom()) return t;
  std::vector<Type> args = t.spine_args();
  for (Type& a : args) a = shuffle_args(rng, a);
  std::shuffle(args.begin(), args.end(), rng);
  return Type::arrow_chain(args, Type::atom(t.head()));
}

}  // namespace testgen
