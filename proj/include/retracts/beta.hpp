#pragma once

// Beta-retractability and beta-embeddability.  Without eta steps a retraction
// can only strip arrow arguments off the front of the larger type: rho is a
// beta-retract of tau exactly when tau = t1 -> ... -> tk -> rho, because the
// decoder may feed free environment variables of types t1..tk to its input.
// An embedding additionally requires combinators, so every ti must be
// derivable from tau itself, which is intuitionistic implicational
// provability.

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "retracts/terms.hpp"
#include "retracts/types.hpp"

namespace retracts {

// The stripped prefix t1..tk with tau = t1 -> ... -> tk -> rho, for the
// smallest such k (rho cannot be a proper suffix of itself, so k is in fact
// unique).  Syntactic equality throughout; no eta slack.
inline std::optional<std::vector<Type>> beta_retract(const Type& rho, const Type& tau) {
  std::vector<Type> stripped;
  Type cur = tau;
  while (true) {
    if (cur == rho) return stripped;
    if (!cur.is_arrow()) return std::nullopt;
    stripped.push_back(cur.argument());
    cur = cur.result();
  }
}

using NamedContext = std::vector<std::pair<std::string, Type>>;

namespace detail {

// Backward search for long-normal inhabitants.  To prove S1 -> ... -> Sn -> a
// the binders are introduced and some hypothesis with head a is applied to
// recursively proven arguments.  Looping is cut off on repeated states, a
// state being the context as a set of types plus the atomic goal; a minimal
// proof never repeats a state on one branch, so this stays complete, and all
// states range over subformulas of the query, so the search terminates.
struct InhabitSearch {
  NameSupply supply;
  std::set<std::string> path;

  static std::string state_key(const NamedContext& ctx, const std::string& target) {
    std::set<std::string> tys;
    for (const auto& [n, t] : ctx) {
      (void)n;
      tys.insert(to_string(t));
    }
    std::string key;
    for (const std::string& s : tys) {
      key += s;
      key += ';';
    }
    key += '|';
    key += target;
    return key;
  }

  std::optional<Term> prove(NamedContext& ctx, const Type& goal) {
    std::vector<Type> args = goal.spine_args();
    std::vector<std::pair<std::string, Type>> binders;
    binders.reserve(args.size());
    for (const Type& a : args) {
      binders.emplace_back(supply.fresh("z"), a);
      ctx.push_back(binders.back());
    }
    const std::string& target = goal.head();

    std::optional<Term> found;
    std::string key = state_key(ctx, target);
    if (path.insert(key).second) {
      std::set<std::string> tried;
      // by index, newest hypothesis first: the recursive calls below push and
      // pop on ctx, which would invalidate iterators and references into it
      for (std::size_t idx = ctx.size(); idx-- > 0 && !found;) {
        std::string name = ctx[idx].first;
        Type ty = ctx[idx].second;
        if (ty.head() != target) continue;
        if (!tried.insert(to_string(ty)).second) continue;
        std::vector<Term> parts;
        bool ok = true;
        for (const Type& need : ty.spine_args()) {
          std::optional<Term> sub = prove(ctx, need);
          if (!sub) {
            ok = false;
            break;
          }
          parts.push_back(std::move(*sub));
        }
        if (ok) {
          Term t = Term::var(name);
          for (const Term& p : parts) t = Term::app(t, p);
          found = std::move(t);
        }
      }
      path.erase(key);
    }

    ctx.resize(ctx.size() - binders.size());
    if (!found) return std::nullopt;
    Term out = std::move(*found);
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      out = Term::abs(it->first, it->second, out);
    return out;
  }
};

}  // namespace detail

// A long-normal inhabitant of goal under the named hypotheses, if any.
inline std::optional<Term> inhabited(const Type& goal, const NamedContext& context = {}) {
  detail::InhabitSearch search;
  NamedContext ctx = context;
  for (const auto& [name, ty] : ctx) {
    (void)ty;
    search.supply.avoid(name);
  }
  return search.prove(ctx, goal);
}

// Embedding: the stripped arguments must each be derivable from tau alone.
// On success returns one inhabitant per stripped argument, proved under
// context_var : tau.
inline std::optional<std::vector<Term>> beta_embed(const Type& rho, const Type& tau,
                                                   const std::string& context_var = "x") {
  std::optional<std::vector<Type>> stripped = beta_retract(rho, tau);
  if (!stripped) return std::nullopt;
  std::vector<Term> witnesses;
  witnesses.reserve(stripped->size());
  for (const Type& t : *stripped) {
    std::optional<Term> w = inhabited(t, {{context_var, tau}});
    if (!w) return std::nullopt;
    witnesses.push_back(std::move(*w));
  }
  return witnesses;
}

// Coder/decoder pair for a beta-retraction: the coder shields the main
// variable behind the stripped binders, the decoder feeds environment
// variables back in.
inline std::optional<RetractWitness> beta_witness(const Type& rho, const Type& tau) {
  std::optional<std::vector<Type>> stripped = beta_retract(rho, tau);
  if (!stripped) return std::nullopt;
  RetractWitness w;
  w.rho = rho;
  w.tau = tau;
  w.main_var = "x";
  Term coder = Term::var("x");
  Term dbody = Term::var("f");
  for (std::size_t i = 0; i < stripped->size(); ++i) {
    std::string e = "E" + std::to_string(i + 1);
    w.env[e] = (*stripped)[i];
    dbody = Term::app(dbody, Term::var(e));
  }
  for (std::size_t i = stripped->size(); i-- > 0;)
    coder = Term::abs("y" + std::to_string(i + 1), (*stripped)[i], coder);
  w.coder = std::move(coder);
  w.decoder = Term::abs("f", tau, dbody);
  return w;
}

// Combinator coder/decoder pair for a beta-embedding: as above, but the
// decoder derives each argument from its own input, so the environment
// stays empty.
inline std::optional<RetractWitness> beta_embed_witness(const Type& rho, const Type& tau) {
  std::optional<std::vector<Type>> stripped = beta_retract(rho, tau);
  if (!stripped) return std::nullopt;
  std::optional<std::vector<Term>> ws = beta_embed(rho, tau, "f");
  if (!ws) return std::nullopt;
  RetractWitness w;
  w.rho = rho;
  w.tau = tau;
  w.main_var = "x";
  Term coder = Term::var("x");
  for (std::size_t i = stripped->size(); i-- > 0;)
    coder = Term::abs("y" + std::to_string(i + 1), (*stripped)[i], coder);
  Term dbody = Term::var("f");
  for (const Term& m : *ws) dbody = Term::app(dbody, m);
  w.coder = std::move(coder);
  w.decoder = Term::abs("f", tau, dbody);
  return w;
}

}  // namespace retracts
