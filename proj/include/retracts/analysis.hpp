#pragma once

// Sound refutation of general retractions, and the aggregation of all
// evidence about a query pair into one verdict.
//
// The refutation side rests on conditions every retraction must satisfy:
// equal heads, non-decreasing rank, every path word of the smaller type
// embedding into a path word of the larger one, and recursively, every
// argument of the smaller type surviving these checks against some delayed
// argument of the larger type.  Passing all of them proves nothing
// (Consistent is not a claim); failing any one of them is a proof of
// impossibility.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "retracts/affine.hpp"
#include "retracts/terms.hpp"
#include "retracts/types.hpp"

namespace retracts {

struct Refutation {
  enum class Kind { HeadMismatch, RankExceeded, PathUnmatched, ArgumentUnsupported };

  Kind kind = Kind::HeadMismatch;
  Type rho, tau;  // the pair at which the condition failed (may be nested)
  PathWord path;  // PathUnmatched: the path word with no embedding target
  Type argument;  // ArgumentUnsupported: the offending argument
  std::vector<Refutation> candidate_failures;  // why each delayed argument failed
};

inline const char* to_string(Refutation::Kind k) {
  switch (k) {
    case Refutation::Kind::HeadMismatch: return "head-mismatch";
    case Refutation::Kind::RankExceeded: return "rank-exceeded";
    case Refutation::Kind::PathUnmatched: return "path-unmatched";
    case Refutation::Kind::ArgumentUnsupported: return "argument-unsupported";
  }
  return "?";
}

inline std::string refutation_summary(const Refutation& r) {
  switch (r.kind) {
    case Refutation::Kind::HeadMismatch:
      return "heads differ: " + r.rho.head() + " vs " + r.tau.head();
    case Refutation::Kind::RankExceeded:
      return "rank " + std::to_string(r.rho.rank()) + " of " + to_string(r.rho) +
             " exceeds rank " + std::to_string(r.tau.rank()) + " of " + to_string(r.tau);
    case Refutation::Kind::PathUnmatched:
      return "path word [" + to_string(r.path) + "] of " + to_string(r.rho) +
             " embeds into no path word of " + to_string(r.tau);
    case Refutation::Kind::ArgumentUnsupported:
      return "argument " + to_string(r.argument) +
             " is consistent with no delayed argument of " + to_string(r.tau);
  }
  return "?";
}

// Consistent is reported as an empty optional; a Refutation certifies that
// no retraction of rho into tau exists, affine or not.
inline std::optional<Refutation> necessary_check(const Type& rho, const Type& tau) {
  Refutation r;
  r.rho = rho;
  r.tau = tau;

  if (rho.head() != tau.head()) {
    r.kind = Refutation::Kind::HeadMismatch;
    return r;
  }
  if (rho.rank() > tau.rank()) {
    r.kind = Refutation::Kind::RankExceeded;
    return r;
  }
  // The witness path in tau may stop above a leaf (the decoder can ignore
  // whatever arguments remain below), so embed into prefixes of the leaf
  // words rather than the full words.
  std::vector<PathWord> tau_paths = paths(tau);
  for (const PathWord& p : paths(rho)) {
    bool matched = false;
    for (const PathWord& q : tau_paths) {
      if (word_embed_prefix(p, q)) {
        matched = true;
        break;
      }
    }
    if (!matched) {
      r.kind = Refutation::Kind::PathUnmatched;
      r.path = p;
      return r;
    }
  }
  // every argument must itself pass against some delayed argument; the
  // recursion keeps this a necessary condition, not a retraction check
  std::vector<std::pair<Type, int>> delayed = delayed_arguments(tau);
  for (const Type& arg : rho.spine_args()) {
    std::vector<Refutation> failures;
    bool supported = false;
    for (const auto& [candidate, depth] : delayed) {
      (void)depth;
      std::optional<Refutation> sub = necessary_check(arg, candidate);
      if (!sub) {
        supported = true;
        break;
      }
      failures.push_back(std::move(*sub));
    }
    if (!supported) {
      r.kind = Refutation::Kind::ArgumentUnsupported;
      r.argument = arg;
      r.candidate_failures = std::move(failures);
      return r;
    }
  }
  return std::nullopt;
}

// ----------------------------------------------------------------- verdicts

struct Verdict {
  enum class Status { AffineRetract, WitnessedRetract, BetaRetract, RefutedNecessary, Unknown };

  Status status = Status::Unknown;
  Type rho, tau;
  std::optional<CfDerivation> derivation;  // AffineRetract
  std::optional<RetractWitness> witness;   // AffineRetract, WitnessedRetract
  std::optional<std::vector<Type>> strip;  // BetaRetract
  std::optional<Refutation> refutation;    // RefutedNecessary
};

inline const char* to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::AffineRetract: return "affine-retract";
    case Verdict::Status::WitnessedRetract: return "witnessed-retract";
    case Verdict::Status::BetaRetract: return "beta-retract";
    case Verdict::Status::RefutedNecessary: return "refuted";
    case Verdict::Status::Unknown: return "unknown";
  }
  return "?";
}

// Evidence priority: self-synthesized affine evidence (isomorphic pairs
// included, the search handles them by matching arguments pairwise), then a
// supplied witness that passes verification, then a sound refutation.
// Anything else is honestly Unknown.  A budget_error from the affine search
// propagates to the caller.
inline Verdict classify(const Type& rho, const Type& tau,
                        const std::optional<RetractWitness>& claimed = std::nullopt,
                        long max_nodes = default_search_nodes) {
  if (claimed && (claimed->rho != rho || claimed->tau != tau))
    throw std::invalid_argument("claimed witness relates " + to_string(claimed->rho) +
                                " and " + to_string(claimed->tau) +
                                ", not the queried pair");
  Verdict v;
  v.rho = rho;
  v.tau = tau;

  if (std::optional<AffineResult> aff = synthesize_affine(rho, tau, max_nodes)) {
    v.status = Verdict::Status::AffineRetract;
    v.derivation = std::move(aff->derivation);
    v.witness = std::move(aff->witness);
    return v;
  }
  if (claimed && verify_witness(*claimed).ok()) {
    v.status = Verdict::Status::WitnessedRetract;
    v.witness = claimed;
    return v;
  }
  if (std::optional<Refutation> ref = necessary_check(rho, tau)) {
    v.status = Verdict::Status::RefutedNecessary;
    v.refutation = std::move(ref);
    return v;
  }
  return v;  // Unknown
}

}  // namespace retracts
