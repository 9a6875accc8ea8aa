#pragma once

// Reference procedures used to cross-check the derivation-based search:
// exhaustive enumeration of long normal terms, a brute-force witness finder
// built on it, and a differential suite that compares the two answers over
// every small type.  Everything here trades speed for being obviously
// correct, so keep it free of the clever pruning the real search does.

#include <algorithm>
#include <bitset>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "retracts/affine.hpp"
#include "retracts/terms.hpp"
#include "retracts/types.hpp"

namespace retracts {

// Shape of the enumeration space.  A negative answer from the oracle always
// means "no witness within this budget", never a proof of absence, except
// when the search ran out of candidates before hitting any cap.
struct EnumBudget {
  int max_term_depth = 8;     // nested application spines per term
  int env_pool_per_type = 2;  // fresh environment variables per atom
  long max_pairs = 20000;     // round trips normalized per query; candidate
                              // streams are also cut at this many terms
};

namespace detail {

using VarMask = std::bitset<128>;

struct EnumVar {
  std::string name;
  Type type;
  bool pool = false;  // interchangeable environment variable
};

// Generates exactly the long normal terms of a goal type: a lambda prefix
// matching the goal's arguments, then a head variable applied to enough
// arguments to reach an atom, each argument again long normal.  In affine
// mode picking a head consumes it, and argument positions of one spine see
// the mask left over by their left neighbours, so no variable is used twice.
//
// Same-typed pool variables are mutually interchangeable, so only the first
// available one is ever offered as a head; this keeps witness environments
// canonical and the space small no matter how large the pool is.
//
// Heads are tried lambda-bound variables first, in binding order, then the
// fixed context in the order given.  Terms that just plumb their own binders
// through to the head therefore surface at the very start of the stream.
class LongNormalEnum {
 public:
  // sink(term, remaining) -> false stops the whole enumeration
  using Sink = std::function<bool(const Term&, const VarMask&)>;
  using TupleSink =
      std::function<bool(const std::vector<Term>&, const VarMask&)>;

  LongNormalEnum(std::vector<EnumVar> vars, bool affine, int max_depth)
      : ctx_(std::move(vars)),
        fixed_(ctx_.size()),
        affine_(affine),
        max_depth_(max_depth) {}

  VarMask initial_mask() const {
    VarMask m;
    for (std::size_t i = 0; i < ctx_.size(); ++i) m.set(i);
    return m;
  }

  bool run(const Type& goal, VarMask avail, const Sink& sink) {
    return gen(goal, avail, max_depth_, sink);
  }

  // Tuples of terms for a goal list, threading the mask left to right.  The
  // depth budget applies to each component separately.
  bool run_tuple(const std::vector<Type>& goals, VarMask avail,
                 const TupleSink& sink) {
    std::vector<Term> acc;
    return tuple_rec(goals, 0, avail, acc, sink);
  }

 private:
  bool tuple_rec(const std::vector<Type>& goals, std::size_t j, VarMask avail,
                 std::vector<Term>& acc, const TupleSink& sink) {
    if (j == goals.size()) return sink(acc, avail);
    return gen(goals[j], avail, max_depth_,
               [&](const Term& t, const VarMask& rest) {
                 acc.push_back(t);
                 bool keep = tuple_rec(goals, j + 1, rest, acc, sink);
                 acc.pop_back();
                 return keep;
               });
  }

  bool gen(const Type& goal, VarMask avail, int depth, const Sink& sink) {
    const std::vector<Type> args = goal.spine_args();
    const std::size_t base = ctx_.size();
    if (base + args.size() > avail.size())
      throw budget_error("enumeration context exceeded the variable mask");
    for (std::size_t i = 0; i < args.size(); ++i) {
      ctx_.push_back({"v" + std::to_string(base + i), args[i], false});
      avail.set(base + i);
    }
    bool keep = heads(goal.head(), avail, depth, base, args.size(), sink);
    ctx_.resize(base);
    return keep;
  }

  bool heads(const std::string& target, const VarMask& avail, int depth,
             std::size_t first, std::size_t nbinders, const Sink& sink) {
    std::set<std::string> pool_seen;
    auto try_head = [&](std::size_t i) -> bool {
      if (!avail.test(i)) return true;
      const EnumVar& v = ctx_[i];
      if (v.pool && !pool_seen.insert(to_string(v.type)).second) return true;
      if (v.type.head() != target) return true;
      std::vector<Type> hargs = v.type.spine_args();
      if (!hargs.empty() && depth < 1) return true;
      VarMask after = avail;
      if (affine_) after.reset(i);
      if (hargs.empty())
        return emit(Term::var(v.name), after, first, nbinders, sink);
      return spine(Term::var(v.name), hargs, 0, after, depth - 1, first,
                   nbinders, sink);
    };
    for (std::size_t i = fixed_; i < ctx_.size(); ++i)
      if (!try_head(i)) return false;
    for (std::size_t i = 0; i < fixed_; ++i)
      if (!try_head(i)) return false;
    return true;
  }

  bool spine(const Term& sofar, const std::vector<Type>& hargs, std::size_t j,
             const VarMask& avail, int depth, std::size_t first,
             std::size_t nbinders, const Sink& sink) {
    if (j == hargs.size()) return emit(sofar, avail, first, nbinders, sink);
    return gen(hargs[j], avail, depth,
               [&](const Term& arg, const VarMask& rest) {
                 return spine(Term::app(sofar, arg), hargs, j + 1, rest, depth,
                              first, nbinders, sink);
               });
  }

  bool emit(Term body, VarMask remaining, std::size_t first,
            std::size_t nbinders, const Sink& sink) {
    for (std::size_t i = first + nbinders; i-- > first;)
      body = Term::abs(ctx_[i].name, ctx_[i].type, body);
    // binder slots get reused by sibling branches; their bits must not leak
    for (std::size_t i = first; i < first + nbinders; ++i) remaining.reset(i);
    return sink(body, remaining);
  }

  std::vector<EnumVar> ctx_;
  std::size_t fixed_;  // entries below this index came from the caller
  bool affine_;
  int max_depth_;
};

inline void collect_atoms(const Type& t, std::set<std::string>& out) {
  if (t.is_atom()) {
    out.insert(t.name());
    return;
  }
  collect_atoms(t.argument(), out);
  collect_atoms(t.result(), out);
}

}  // namespace detail

// Visits every long normal inhabitant of goal whose free variables come from
// env.  With affine_only set, each variable, bound or from env, is used at
// most once.  Stops when visit returns false; returns the number visited.
template <typename Visitor>
  requires std::invocable<Visitor&, const Term&>
std::size_t enumerate_long_normal(const TypeEnv& env, const Type& goal,
                                  int max_depth, bool affine_only,
                                  Visitor&& visit) {
  std::vector<detail::EnumVar> vars;
  for (const auto& [name, ty] : env) vars.push_back({name, ty, false});
  detail::LongNormalEnum en(std::move(vars), affine_only, max_depth);
  std::size_t count = 0;
  en.run(goal, en.initial_mask(),
         [&](const Term& t, const detail::VarMask&) {
           ++count;
           return static_cast<bool>(visit(t));
         });
  return count;
}

inline std::vector<Term> enumerate_long_normal(const TypeEnv& env,
                                               const Type& goal, int max_depth,
                                               bool affine_only,
                                               std::size_t max_terms) {
  std::vector<Term> out;
  if (max_terms == 0) return out;
  enumerate_long_normal(env, goal, max_depth, affine_only,
                        [&](const Term& t) {
                          out.push_back(t);
                          return out.size() < max_terms;
                        });
  return out;
}

struct OracleOutcome {
  std::optional<RetractWitness> witness;
  long decoders = 0;        // decoder candidates materialized
  long coders = 0;          // coder candidates paired against them
  long pairs = 0;           // round trips actually normalized
  long verify_rejects = 0;  // round trips that passed the quick check only
  bool budget_hit = false;  // a cap cut the search short of exhaustion
};

// Brute-force search for an affine witness, independent of the derivation
// machinery.  A decoder in long normal form must look like
//
//     \f:tau. \z1 .. \zm. f S1 .. Sn
//
// with m the arity of rho and n the arity of tau: the body must normalize to
// the bound occurrence of the coded value, and a head other than f would
// survive normalization, so f in head position is forced, not an assumption.
// Coders are arbitrary affine long normal terms of type tau over x : rho and
// the environment pool.  Environment variables only ever need atomic types:
// an environment-headed subterm never reduces and must be discarded wholesale
// for the round trip to come out clean, so it may as well be a single
// variable of the atom it produces, eta-expanded into place.
//
// Two filters keep the quadratic sweep honest but cheap.  A decoder tuple
// that fails to consume some zi is dropped outright: zi would be missing
// from the normal form of the round trip, which uses every argument.  And a
// pair is only normalized when every slot carrying a zi is an argument the
// coder actually uses; a dropped slot loses its zi the moment the coder
// consumes the tuple.  The first is exact, the second merely necessary, so
// the normalization still has the final word.
inline OracleOutcome brute_force_affine(const Type& rho, const Type& tau,
                                        const EnumBudget& budget = {}) {
  OracleOutcome out;
  // f applied to tau's arguments yields tau's head atom; the decoder body
  // must have rho's head atom
  if (rho.head() != tau.head()) return out;

  const std::vector<Type> rho_args = rho.spine_args();
  const std::vector<Type> tau_args = tau.spine_args();
  const std::size_t nz = rho_args.size();

  std::set<std::string> atoms;
  detail::collect_atoms(rho, atoms);
  detail::collect_atoms(tau, atoms);
  std::vector<detail::EnumVar> pool;
  int env_counter = 0;
  for (const std::string& a : atoms)
    for (int k = 0; k < budget.env_pool_per_type; ++k)
      pool.push_back(
          {"E" + std::to_string(++env_counter), Type::atom(a), true});

  std::vector<Term> decoders;
  std::vector<std::uint64_t> dneed;  // slots holding some zi, per decoder
  {
    std::vector<detail::EnumVar> dvars;
    for (std::size_t i = 0; i < nz; ++i)
      dvars.push_back({"z" + std::to_string(i + 1), rho_args[i], false});
    for (const detail::EnumVar& v : pool) dvars.push_back(v);
    detail::LongNormalEnum den(dvars, true, budget.max_term_depth);
    long visited = 0;
    den.run_tuple(
        tau_args, den.initial_mask(),
        [&](const std::vector<Term>& ss, const detail::VarMask& remaining) {
          ++visited;
          bool consumed_all = true;
          for (std::size_t i = 0; i < nz; ++i)
            if (remaining.test(i)) {
              consumed_all = false;
              break;
            }
          if (consumed_all) {
            std::uint64_t need = 0;
            for (std::size_t j = 0; j < ss.size() && j < 64; ++j) {
              std::set<std::string> fv = free_vars(ss[j]);
              for (std::size_t i = 0; i < nz; ++i)
                if (fv.count("z" + std::to_string(i + 1))) {
                  need |= std::uint64_t{1} << j;
                  break;
                }
            }
            Term body = Term::apply(Term::var("f"), ss);
            for (std::size_t i = nz; i-- > 0;)
              body =
                  Term::abs("z" + std::to_string(i + 1), rho_args[i], body);
            decoders.push_back(Term::abs("f", tau, body));
            dneed.push_back(need);
          }
          if (visited >= budget.max_pairs) {
            out.budget_hit = true;
            return false;
          }
          return true;
        });
    out.decoders = static_cast<long>(decoders.size());
  }
  if (decoders.empty()) return out;

  std::vector<Term> coders;
  {
    std::vector<detail::EnumVar> cvars;
    cvars.push_back({"x", rho, false});
    for (const detail::EnumVar& v : pool) cvars.push_back(v);
    detail::LongNormalEnum cen(cvars, true, budget.max_term_depth);
    long visited = 0;
    cen.run(tau, cen.initial_mask(),
            [&](const Term& coder, const detail::VarMask& remaining) {
              ++visited;
              // a coder that never uses x cannot round-trip to it
              if (!remaining.test(0)) coders.push_back(coder);
              if (visited >= budget.max_pairs) {
                out.budget_hit = true;
                return false;
              }
              return true;
            });
    out.coders = static_cast<long>(coders.size());
  }
  if (coders.empty()) return out;

  // which of its own top-level binders each coder's body mentions
  std::vector<std::uint64_t> cuses;
  cuses.reserve(coders.size());
  for (const Term& coder : coders) {
    Term t = coder;
    std::vector<std::string> binders;
    for (std::size_t j = 0; j < tau_args.size() && t.is_abs(); ++j) {
      binders.push_back(t.name());
      t = t.body();
    }
    std::set<std::string> fv = free_vars(t);
    std::uint64_t used = 0;
    for (std::size_t j = 0; j < binders.size() && j < 64; ++j)
      if (fv.count(binders[j])) used |= std::uint64_t{1} << j;
    cuses.push_back(used);
  }

  // Sweep combinations by ascending coder index plus decoder index: a
  // witness that is simple on either axis is then reached without first
  // crossing a full row of the product.
  const Term xvar = Term::var("x");
  const std::size_t nc = coders.size(), nd = decoders.size();
  const long grid_cap = 64 * budget.max_pairs;
  long grid = 0;
  for (std::size_t s = 0; s + 1 < nc + nd; ++s) {
    std::size_t c_hi = std::min(s, nc - 1);
    std::size_t c_lo = s >= nd ? s - nd + 1 : 0;
    for (std::size_t c = c_lo; c <= c_hi; ++c) {
      if (++grid > grid_cap) {
        out.budget_hit = true;
        return out;
      }
      if ((dneed[s - c] & ~cuses[c]) != 0) continue;
      if (out.pairs >= budget.max_pairs) {
        out.budget_hit = true;
        return out;
      }
      ++out.pairs;
      const Term& coder = coders[c];
      const Term& dec = decoders[s - c];
      if (!alpha_equal(beta_eta_normal(Term::app(dec, coder)), xvar)) continue;
      RetractWitness w;
      w.rho = rho;
      w.tau = tau;
      w.coder = coder;
      w.decoder = dec;
      w.main_var = "x";
      std::set<std::string> used = free_vars(coder);
      std::set<std::string> dfree = free_vars(dec);
      used.insert(dfree.begin(), dfree.end());
      for (const detail::EnumVar& v : pool)
        if (used.count(v.name)) w.env.emplace(v.name, v.type);
      WitnessReport rep = verify_witness(w);
      if (rep.ok() && rep.affine()) {
        out.witness = std::move(w);
        return out;
      }
      ++out.verify_rejects;
    }
  }
  return out;
}

// Every type over the alphabet with at most max_atoms atoms, one
// representative per permutation class, in type_less order.  Built
// bottom-up: a representative with n atoms is a head atom under a
// type_less-sorted multiset of smaller representatives.
inline std::vector<Type> all_canonical_types(
    const std::vector<std::string>& alphabet, int max_atoms) {
  std::vector<Type> pool;  // all representatives built so far, ascending
  std::vector<Type> out;
  for (int n = 1; n <= max_atoms; ++n) {
    std::vector<Type> level;
    std::vector<Type> args;
    // nondecreasing sequences over the pool with atom counts summing to n-1
    auto choose = [&](auto&& self, int remaining, std::size_t min_idx) -> void {
      if (remaining == 0) {
        for (const std::string& head : alphabet)
          level.push_back(Type::arrow_chain(args, Type::atom(head)));
        return;
      }
      for (std::size_t i = min_idx; i < pool.size(); ++i) {
        if (pool[i].atom_count() > remaining) continue;
        args.push_back(pool[i]);
        self(self, remaining - pool[i].atom_count(), i);
        args.pop_back();
      }
    };
    choose(choose, n - 1, 0);
    // the pool must stay in type_less order, or index-monotone argument
    // picks would stop matching the canonical argument order
    std::sort(level.begin(), level.end(), type_less);
    pool.insert(pool.end(), level.begin(), level.end());
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

struct AgreementReport {
  long pairs = 0;
  long affine_yes = 0;       // pairs the derivation search accepts
  long witnesses = 0;        // pairs the brute force finds a witness for
  long budget_hits = 0;      // queries that ran into an oracle cap
  long undecided = 0;        // queries where the derivation search gave up
  long verify_rejects = 0;
  long max_pairs_needed = 0;  // worst round-trip count among successes
  long max_decoders = 0;      // largest decoder set any query materialized
  long max_coders = 0;
  std::vector<std::pair<Type, Type>> disagreements;   // capped at 32
  std::vector<std::pair<Type, Type>> mutual_distinct;  // capped at 32
  double seconds = 0.0;
  bool agreed() const { return disagreements.empty() && undecided == 0; }
};

// Differential run over every ordered pair of small canonical types: the
// derivation search and the brute force must accept exactly the same pairs.
// Also records mutual retracts between distinct representatives, which the
// permutability theory says cannot exist.
inline AgreementReport run_agreement_suite(
    const std::vector<std::string>& alphabet, int max_atoms,
    const EnumBudget& budget = {}, int threads = 0,
    const std::function<void(long, long)>& progress = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Type> universe = all_canonical_types(alphabet, max_atoms);
  const std::size_t n = universe.size();

  AgreementReport report;
  report.pairs = static_cast<long>(n) * static_cast<long>(n);
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (static_cast<std::size_t>(threads) > n && n > 0)
    threads = static_cast<int>(n);

  std::vector<unsigned char> accept(n * n, 0);
  std::vector<AgreementReport> locals(threads);
  std::mutex progress_mutex;
  long rows_done = 0;

  auto worker = [&](int id) {
    AgreementReport& local = locals[id];
    AffineSearcher searcher;
    const std::size_t lo = n * id / threads;
    const std::size_t hi = n * (id + 1) / threads;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Type& rho = universe[i];
        const Type& tau = universe[j];
        bool mine = false;
        bool known = true;
        try {
          mine = searcher.decide(rho, tau).has_value();
        } catch (const budget_error&) {
          known = false;
          ++local.undecided;
        }
        OracleOutcome oc = brute_force_affine(rho, tau, budget);
        if (mine) accept[i * n + j] = 1;
        if (mine) ++local.affine_yes;
        if (oc.witness) {
          ++local.witnesses;
          local.max_pairs_needed = std::max(local.max_pairs_needed, oc.pairs);
        }
        if (oc.budget_hit) ++local.budget_hits;
        local.verify_rejects += oc.verify_rejects;
        local.max_decoders = std::max(local.max_decoders, oc.decoders);
        local.max_coders = std::max(local.max_coders, oc.coders);
        if (known && mine != oc.witness.has_value() &&
            local.disagreements.size() < 32)
          local.disagreements.emplace_back(rho, tau);
      }
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        ++rows_done;
        progress(rows_done * static_cast<long>(n), report.pairs);
      }
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> crew;
    for (int id = 0; id < threads; ++id) crew.emplace_back(worker, id);
    for (std::thread& t : crew) t.join();
  }

  for (const AgreementReport& local : locals) {
    report.affine_yes += local.affine_yes;
    report.witnesses += local.witnesses;
    report.budget_hits += local.budget_hits;
    report.undecided += local.undecided;
    report.verify_rejects += local.verify_rejects;
    report.max_pairs_needed =
        std::max(report.max_pairs_needed, local.max_pairs_needed);
    report.max_decoders = std::max(report.max_decoders, local.max_decoders);
    report.max_coders = std::max(report.max_coders, local.max_coders);
    for (const auto& d : local.disagreements)
      if (report.disagreements.size() < 32) report.disagreements.push_back(d);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (accept[i * n + j] && accept[j * n + i] &&
          report.mutual_distinct.size() < 32)
        report.mutual_distinct.emplace_back(universe[i], universe[j]);

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

}  // namespace retracts
