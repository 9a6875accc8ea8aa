#pragma once

// Deciding affine retractability.  The decision procedure searches for a
// cut-free derivation built from four rules (Axiom, H, N, D); a found
// derivation is translated into the axiomatic system (A1, A2, A4, R1, R2),
// from which coder/decoder terms are synthesized and can be re-checked by
// the term kernel.
//
// Everything is read modulo type isomorphism: a rule instance is valid when
// its conclusion matches the schema up to ~, and witness synthesis inserts
// explicit conversion terms wherever two isomorphic types differ
// syntactically.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "retracts/terms.hpp"
#include "retracts/types.hpp"

namespace retracts {

struct budget_error : std::runtime_error {
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

struct invalid_derivation : std::runtime_error {
  explicit invalid_derivation(const std::string& what) : std::runtime_error(what) {}
};

// ------------------------------------------------------ cut-free calculus

enum class CfRule { Axiom, H, N, D };

inline const char* to_string(CfRule r) {
  switch (r) {
    case CfRule::Axiom: return "Axiom";
    case CfRule::H: return "H";
    case CfRule::N: return "N";
    case CfRule::D: return "D";
  }
  return "?";
}

// One derivation node concluding rho <= tau.
//  Axiom:  a <= a                                            (no premises)
//  H:      from s <= s', t <= t' conclude s->t <= s'->t'     (two premises)
//  N:      from r <= t conclude r <= discarded->t            (one premise)
//  D:      from D1->a <= s1, ..., Dn->a <= sn conclude
//          (D1 u ... u Dn)->a <= {S1->s1->a, ..., Sn->sn->a}->a,
//          where Sj = group_discarded[j]                     (n premises)
struct CfDerivation {
  CfRule rule = CfRule::Axiom;
  Type rho, tau;
  std::vector<CfDerivation> premises;
  std::vector<Type> discarded;                     // N only
  std::vector<std::vector<Type>> group_discarded;  // D only, one per premise
};

struct CheckResult {
  bool ok = true;
  std::string error;
  explicit operator bool() const { return ok; }
};

inline CheckResult check_cf(const CfDerivation& d) {
  auto fail = [&](const std::string& msg) {
    return CheckResult{false,
                       msg + " (at " + to_string(d.rho) + " <= " + to_string(d.tau) + ")"};
  };
  switch (d.rule) {
    case CfRule::Axiom:
      if (!d.premises.empty()) return fail("Axiom must not have premises");
      if (!d.rho.is_atom() || !d.tau.is_atom() || d.rho.name() != d.tau.name())
        return fail("Axiom requires two identical atoms");
      break;
    case CfRule::H: {
      if (d.premises.size() != 2) return fail("H needs exactly two premises");
      const CfDerivation& p = d.premises[0];
      const CfDerivation& q = d.premises[1];
      if (!iso(d.rho, Type::arrow(p.rho, q.rho)))
        return fail("H left side does not split into the premises");
      if (!iso(d.tau, Type::arrow(p.tau, q.tau)))
        return fail("H right side does not split into the premises");
      break;
    }
    case CfRule::N: {
      if (d.premises.size() != 1) return fail("N needs exactly one premise");
      const CfDerivation& p = d.premises[0];
      if (!iso(d.rho, p.rho)) return fail("N must not change the left side");
      if (!iso(d.tau, Type::arrow_chain(d.discarded, p.tau)))
        return fail("N right side is not the premise plus the discarded arguments");
      break;
    }
    case CfRule::D: {
      if (d.premises.empty()) return fail("D needs at least one premise");
      if (d.group_discarded.size() != d.premises.size())
        return fail("D needs one discarded multiset per premise");
      const std::string& a = d.rho.head();
      if (d.tau.head() != a) return fail("D heads differ");
      std::vector<Type> delta_all;
      std::vector<Type> targets;
      for (std::size_t j = 0; j < d.premises.size(); ++j) {
        const CfDerivation& p = d.premises[j];
        if (p.rho.head() != a) return fail("D premise left side has the wrong head");
        for (const Type& arg : p.rho.spine_args()) delta_all.push_back(arg);
        std::vector<Type> t = d.group_discarded[j];
        t.push_back(p.tau);
        targets.push_back(Type::arrow_chain(t, Type::atom(a)));
      }
      if (!iso(d.rho, Type::arrow_chain(delta_all, Type::atom(a))))
        return fail("D left side is not the union of the premise arguments");
      if (!iso(d.tau, Type::arrow_chain(targets, Type::atom(a))))
        return fail("D right side does not assemble from the premises");
      break;
    }
  }
  for (const CfDerivation& p : d.premises) {
    CheckResult r = check_cf(p);
    if (!r.ok) return r;
  }
  return {};
}

// ---------------------------------------------------------- axiom system

enum class LpsRule { A1, A2, A4, R1, R2 };

inline const char* to_string(LpsRule r) {
  switch (r) {
    case LpsRule::A1: return "A1";
    case LpsRule::A2: return "A2";
    case LpsRule::A4: return "A4";
    case LpsRule::R1: return "R1";
    case LpsRule::R2: return "R2";
  }
  return "?";
}

//  A1:  s <= s
//  A2:  s <= added -> s
//  A4:  s <= (s -> a) -> a   provided head(s) = a
//  R1:  from r <= m, m <= t conclude r <= t
//  R2:  from s <= s', t <= t' conclude s->t <= s'->t'
struct LpsDerivation {
  LpsRule rule = LpsRule::A1;
  Type rho, tau;
  std::vector<LpsDerivation> premises;
  Type added;  // A2 only
};

inline CheckResult check_lps(const LpsDerivation& d) {
  auto fail = [&](const std::string& msg) {
    return CheckResult{false,
                       msg + " (at " + to_string(d.rho) + " <= " + to_string(d.tau) + ")"};
  };
  switch (d.rule) {
    case LpsRule::A1:
      if (!d.premises.empty()) return fail("A1 must not have premises");
      if (!iso(d.rho, d.tau)) return fail("A1 requires isomorphic sides");
      break;
    case LpsRule::A2:
      if (!d.premises.empty()) return fail("A2 must not have premises");
      if (!d.added) return fail("A2 must record the added argument");
      if (!iso(d.tau, Type::arrow(d.added, d.rho)))
        return fail("A2 right side is not the left side plus the added argument");
      break;
    case LpsRule::A4: {
      if (!d.premises.empty()) return fail("A4 must not have premises");
      const std::string& a = d.tau.head();
      if (d.rho.head() != a)
        return fail("A4 side condition failed: head(" + to_string(d.rho) + ") is not " + a);
      Type atom_a = Type::atom(a);
      if (!iso(d.tau, Type::arrow(Type::arrow(d.rho, atom_a), atom_a)))
        return fail("A4 right side is not ((left -> a) -> a)");
      break;
    }
    case LpsRule::R1: {
      if (d.premises.size() != 2) return fail("R1 needs exactly two premises");
      if (!iso(d.premises[0].tau, d.premises[1].rho))
        return fail("R1 premises do not chain");
      if (!iso(d.rho, d.premises[0].rho) || !iso(d.tau, d.premises[1].tau))
        return fail("R1 conclusion does not match the premise endpoints");
      break;
    }
    case LpsRule::R2: {
      if (d.premises.size() != 2) return fail("R2 needs exactly two premises");
      if (!iso(d.rho, Type::arrow(d.premises[0].rho, d.premises[1].rho)))
        return fail("R2 left side does not split into the premises");
      if (!iso(d.tau, Type::arrow(d.premises[0].tau, d.premises[1].tau)))
        return fail("R2 right side does not split into the premises");
      break;
    }
  }
  for (const LpsDerivation& p : d.premises) {
    CheckResult r = check_lps(p);
    if (!r.ok) return r;
  }
  return {};
}

// ----------------------------------------------------------------- search

inline constexpr long default_search_nodes = 20'000'000;

// Decides rho <= tau by exhaustive search over a single combined rule: the
// arguments of rho are split into passive ones, each retracting into its own
// argument of tau, and groups, each handled by one argument of tau of shape
// S -> s -> a via the premise (group)->a <= s.  Remaining arguments of tau
// are discarded.  Found assignments are recorded as an H*/N/D chain.
//
// The memo table lives in the searcher instance; independent instances can
// run concurrently.
class AffineSearcher {
 public:
  explicit AffineSearcher(long max_nodes = default_search_nodes) : nodes_left_(max_nodes) {}

  std::optional<CfDerivation> decide(const Type& rho, const Type& tau) {
    tick();
    // heads never change along a derivation, and both rank and atom count
    // can only grow from left to right
    if (rho.head() != tau.head()) return std::nullopt;
    if (rho.rank() > tau.rank()) return std::nullopt;
    if (rho.atom_count() > tau.atom_count()) return std::nullopt;

    std::string key = canon_key(rho);
    key += '|';
    key += canon_key(tau);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    std::optional<CfDerivation> result = search(rho, tau);
    memo_.emplace(std::move(key), result);
    return result;
  }

  long nodes_used() const { return start_ - nodes_left_; }

 private:
  void tick() {
    if (--nodes_left_ < 0) throw budget_error("affine retraction search budget exhausted");
  }

  std::optional<CfDerivation> search(const Type& rho, const Type& tau) {
    const std::string a = rho.head();
    std::vector<Type> rargs = rho.spine_args();
    std::vector<Type> targs = tau.spine_args();

    if (rargs.empty()) {
      CfDerivation ax;
      ax.rule = CfRule::Axiom;
      ax.rho = Type::atom(a);
      ax.tau = Type::atom(a);
      if (targs.empty()) return ax;
      CfDerivation n;
      n.rule = CfRule::N;
      n.rho = rho;
      n.tau = tau;
      n.discarded = std::move(targs);
      n.premises.push_back(std::move(ax));
      return n;
    }
    if (targs.empty()) return std::nullopt;

    const std::size_t L = rargs.size(), N = targs.size();
    std::vector<int> slot(N, 0);  // 0 free, 1 passive, 2 active
    std::vector<std::vector<std::size_t>> group(N);
    std::vector<CfDerivation> passive_prem(N);
    std::vector<std::size_t> passive_of(N, 0);

    std::optional<CfDerivation> out;

    auto finalize = [&]() -> bool {
      struct Pick {
        std::size_t slot;
        CfDerivation premise;
        std::vector<Type> sigma;
      };
      std::vector<Pick> picks;
      for (std::size_t j = 0; j < N; ++j) {
        if (slot[j] != 2) continue;
        std::vector<Type> delta;
        for (std::size_t i : group[j]) delta.push_back(rargs[i]);
        Type lhs = Type::arrow_chain(delta, Type::atom(a));
        std::vector<Type> cand = targs[j].spine_args();
        bool found = false;
        std::set<std::string> tried;
        for (std::size_t p = 0; p < cand.size(); ++p) {
          if (!tried.insert(to_string(cand[p])).second) continue;
          auto sub = decide(lhs, cand[p]);
          if (!sub) continue;
          Pick pick;
          pick.slot = j;
          pick.premise = std::move(*sub);
          for (std::size_t q = 0; q < cand.size(); ++q)
            if (q != p) pick.sigma.push_back(cand[q]);
          picks.push_back(std::move(pick));
          found = true;
          break;
        }
        if (!found) return false;
      }

      // assemble: D over the groups, N for the discards, H per passive pair
      CfDerivation core;
      if (picks.empty()) {
        core.rule = CfRule::Axiom;
        core.rho = Type::atom(a);
        core.tau = Type::atom(a);
      } else {
        core.rule = CfRule::D;
        std::vector<Type> delta_all;
        std::vector<Type> targets;
        for (Pick& p : picks) {
          for (const Type& t : p.premise.rho.spine_args()) delta_all.push_back(t);
          targets.push_back(targs[p.slot]);
          core.premises.push_back(std::move(p.premise));
          core.group_discarded.push_back(std::move(p.sigma));
        }
        core.rho = Type::arrow_chain(delta_all, Type::atom(a));
        core.tau = Type::arrow_chain(targets, Type::atom(a));
      }
      std::vector<Type> free_types;
      for (std::size_t j = 0; j < N; ++j)
        if (slot[j] == 0) free_types.push_back(targs[j]);
      if (!free_types.empty()) {
        CfDerivation n;
        n.rule = CfRule::N;
        n.rho = core.rho;
        n.tau = Type::arrow_chain(free_types, core.tau);
        n.discarded = std::move(free_types);
        n.premises.push_back(std::move(core));
        core = std::move(n);
      }
      // passive pairs wrapped outermost-first by rho argument index
      std::vector<std::pair<std::size_t, std::size_t>> passives;  // (i, j)
      for (std::size_t j = 0; j < N; ++j)
        if (slot[j] == 1) passives.emplace_back(passive_of[j], j);
      std::sort(passives.begin(), passives.end());
      for (auto it = passives.rbegin(); it != passives.rend(); ++it) {
        CfDerivation h;
        h.rule = CfRule::H;
        h.rho = Type::arrow(rargs[it->first], core.rho);
        h.tau = Type::arrow(targs[it->second], core.tau);
        h.premises.push_back(passive_prem[it->second]);
        h.premises.push_back(std::move(core));
        core = std::move(h);
      }
      core.rho = rho;
      core.tau = tau;
      out = std::move(core);
      return true;
    };

    std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
      tick();
      if (i == L) return finalize();
      // passive placement into a free slot; identical slot types are tried once
      {
        std::set<std::string> seen;
        for (std::size_t j = 0; j < N; ++j) {
          if (slot[j] != 0) continue;
          if (!seen.insert(to_string(targs[j])).second) continue;
          auto prem = decide(rargs[i], targs[j]);
          if (!prem) continue;
          slot[j] = 1;
          passive_prem[j] = std::move(*prem);
          passive_of[j] = i;
          if (assign(i + 1)) return true;
          slot[j] = 0;
        }
      }
      // join an existing group
      for (std::size_t j = 0; j < N; ++j) {
        if (slot[j] != 2) continue;
        group[j].push_back(i);
        if (assign(i + 1)) return true;
        group[j].pop_back();
      }
      // open a new group; identical slot types are tried once
      {
        std::set<std::string> seen;
        for (std::size_t j = 0; j < N; ++j) {
          if (slot[j] != 0) continue;
          if (!targs[j].is_arrow() || targs[j].head() != a) continue;
          if (!seen.insert(to_string(targs[j])).second) continue;
          slot[j] = 2;
          group[j].push_back(i);
          if (assign(i + 1)) return true;
          group[j].clear();
          slot[j] = 0;
        }
      }
      return false;
    };

    if (!assign(0)) return std::nullopt;
    return out;
  }

  std::unordered_map<std::string, std::optional<CfDerivation>> memo_;
  long nodes_left_;
  long start_ = nodes_left_;
};

inline std::optional<CfDerivation> decide_affine(const Type& rho, const Type& tau,
                                                 long max_nodes = default_search_nodes) {
  AffineSearcher s(max_nodes);
  return s.decide(rho, tau);
}

// ------------------------------------------------------- CF to axiomatic

namespace detail {

inline LpsDerivation lps_a1(const Type& t) {
  LpsDerivation d;
  d.rule = LpsRule::A1;
  d.rho = t;
  d.tau = t;
  return d;
}

inline LpsDerivation lps_a2(const Type& sigma, const Type& added) {
  LpsDerivation d;
  d.rule = LpsRule::A2;
  d.rho = sigma;
  d.tau = Type::arrow(added, sigma);
  d.added = added;
  return d;
}

inline LpsDerivation lps_a4(const Type& sigma) {
  LpsDerivation d;
  d.rule = LpsRule::A4;
  Type a = Type::atom(sigma.head());
  d.rho = sigma;
  d.tau = Type::arrow(Type::arrow(sigma, a), a);
  return d;
}

inline LpsDerivation lps_r1(LpsDerivation l, LpsDerivation r) {
  LpsDerivation d;
  d.rule = LpsRule::R1;
  d.rho = l.rho;
  d.tau = r.tau;
  d.premises.push_back(std::move(l));
  d.premises.push_back(std::move(r));
  return d;
}

inline LpsDerivation lps_r2(LpsDerivation l, LpsDerivation r) {
  LpsDerivation d;
  d.rule = LpsRule::R2;
  d.rho = Type::arrow(l.rho, r.rho);
  d.tau = Type::arrow(l.tau, r.tau);
  d.premises.push_back(std::move(l));
  d.premises.push_back(std::move(r));
  return d;
}

inline LpsDerivation lps_translate(const CfDerivation& d) {
  switch (d.rule) {
    case CfRule::Axiom:
      return lps_a1(d.rho);
    case CfRule::H: {
      LpsDerivation out = lps_r2(lps_translate(d.premises[0]), lps_translate(d.premises[1]));
      out.rho = d.rho;
      out.tau = d.tau;
      return out;
    }
    case CfRule::N: {
      // r <= t, then one A2 per discarded argument, chained with R1
      LpsDerivation cur = lps_translate(d.premises[0]);
      for (const Type& s : d.discarded) {
        Type mid = cur.tau;
        cur = lps_r1(std::move(cur), lps_a2(mid, s));
      }
      cur.rho = d.rho;
      cur.tau = d.tau;
      return cur;
    }
    case CfRule::D: {
      // For each group j, right to left:
      //   Dj->a <= ((Dj->a)->a)->a          by A4
      //          <= (sj->a)->a              by R2 twice over the premise
      //          <= (Sj->sj->a)->a          by A2 per element of Sj, lifted
      // then the other arguments present at that step are peeled with R2/A1
      // and the steps are chained with R1.
      const std::string a = d.rho.head();
      Type atom_a = Type::atom(a);
      const std::size_t n = d.premises.size();
      std::vector<Type> targets(n);
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<Type> t = d.group_discarded[j];
        t.push_back(d.premises[j].tau);
        targets[j] = Type::arrow_chain(t, atom_a);
      }

      auto step = [&](std::size_t j) -> LpsDerivation {
        const Type& lhs = d.premises[j].rho;  // Dj -> a
        LpsDerivation pj = lps_translate(d.premises[j]);
        LpsDerivation inner = lps_r2(std::move(pj), lps_a1(atom_a));
        LpsDerivation outer = lps_r2(std::move(inner), lps_a1(atom_a));
        LpsDerivation cur = lps_r1(lps_a4(lhs), std::move(outer));
        if (!d.group_discarded[j].empty()) {
          Type base = Type::arrow(d.premises[j].tau, atom_a);  // sj -> a
          LpsDerivation acc = lps_a2(base, d.group_discarded[j][0]);
          for (std::size_t k = 1; k < d.group_discarded[j].size(); ++k) {
            Type mid = acc.tau;
            acc = lps_r1(std::move(acc), lps_a2(mid, d.group_discarded[j][k]));
          }
          LpsDerivation lift = lps_r2(std::move(acc), lps_a1(atom_a));
          cur = lps_r1(std::move(cur), std::move(lift));
        }
        // arguments passive at this step: all earlier groups' arguments and
        // the already-processed targets
        std::vector<Type> passives;
        for (std::size_t r = 0; r < j; ++r)
          for (const Type& t : d.premises[r].rho.spine_args()) passives.push_back(t);
        for (std::size_t r = j + 1; r < n; ++r) passives.push_back(targets[r]);
        for (auto it = passives.rbegin(); it != passives.rend(); ++it)
          cur = lps_r2(lps_a1(*it), std::move(cur));
        return cur;
      };

      LpsDerivation full = step(n - 1);
      for (std::size_t j = n - 1; j-- > 0;) full = lps_r1(std::move(full), step(j));
      full.rho = d.rho;
      full.tau = d.tau;
      return full;
    }
  }
  throw invalid_derivation("unreachable rule");
}

}  // namespace detail

inline LpsDerivation lps_from_cf(const CfDerivation& d) {
  CheckResult r = check_cf(d);
  if (!r.ok) throw invalid_derivation("lps_from_cf: " + r.error);
  return detail::lps_translate(d);
}

// ------------------------------------------------------ witness synthesis

namespace detail {

// Builds coder/decoder pairs by recursion on a derivation.  Every variable
// (binders, main variables, environment variables) comes from one supply,
// so compositions never clash; environment variables carry the reserved
// prefix E.
struct WitnessSynth {
  NameSupply supply;

  static TypeEnv merged(TypeEnv a, const TypeEnv& b) {
    a.insert(b.begin(), b.end());
    return a;
  }

  // A term of type `to` converting src of isomorphic type `from`.
  Term convert(const Term& src, const Type& from, const Type& to) {
    if (from == to) return src;
    std::vector<Type> fargs = from.spine_args();
    std::vector<Type> targs = to.spine_args();
    assert(fargs.size() == targs.size());
    std::vector<std::size_t> forder(fargs.size()), torder(targs.size());
    for (std::size_t i = 0; i < forder.size(); ++i) forder[i] = i;
    for (std::size_t i = 0; i < torder.size(); ++i) torder[i] = i;
    auto by_key = [](const std::vector<Type>& v) {
      return [&v](std::size_t x, std::size_t y) {
        std::string kx = canon_key(v[x]), ky = canon_key(v[y]);
        if (kx != ky) return kx < ky;
        return x < y;
      };
    };
    std::sort(forder.begin(), forder.end(), by_key(fargs));
    std::sort(torder.begin(), torder.end(), by_key(targs));
    // from-position j is fed by to-position matched[j]
    std::vector<std::size_t> matched(fargs.size());
    for (std::size_t k = 0; k < fargs.size(); ++k) matched[forder[k]] = torder[k];
    std::vector<std::string> names(targs.size());
    for (std::size_t i = 0; i < targs.size(); ++i) names[i] = supply.fresh("v");
    Term out = src;
    for (std::size_t j = 0; j < fargs.size(); ++j) {
      std::size_t i = matched[j];
      out = Term::app(out, convert(Term::var(names[i]), targs[i], fargs[j]));
    }
    for (std::size_t i = targs.size(); i-- > 0;)
      out = Term::abs(names[i], targs[i], out);
    return out;
  }

  RetractWitness iso_witness(const Type& from, const Type& to) {
    RetractWitness w;
    w.rho = from;
    w.tau = to;
    w.main_var = supply.fresh("x");
    w.coder = convert(Term::var(w.main_var), from, to);
    std::string f = supply.fresh("f");
    w.decoder = Term::abs(f, to, convert(Term::var(f), to, from));
    return w;
  }

  // sequential composition: w1 : rho <= mid, w2 : mid <= tau (exact mid)
  RetractWitness compose(RetractWitness w1, RetractWitness w2) {
    assert(w1.tau == w2.rho);
    RetractWitness w;
    w.rho = w1.rho;
    w.tau = w2.tau;
    w.main_var = w1.main_var;
    w.coder = subst(w2.coder, w2.main_var, w1.coder);
    std::string g = supply.fresh("g");
    w.decoder =
        Term::abs(g, w.tau, Term::app(w1.decoder, Term::app(w2.decoder, Term::var(g))));
    w.env = merged(std::move(w1.env), w2.env);
    return w;
  }

  // align the endpoints with the recorded conclusion, inserting conversions
  RetractWitness adapt(RetractWitness w, const Type& rho, const Type& tau) {
    if (w.rho != rho) {
      // build the converter before compose() moves w out from under it
      RetractWitness pre = iso_witness(rho, w.rho);
      w = compose(std::move(pre), std::move(w));
    }
    if (w.tau != tau) {
      RetractWitness post = iso_witness(w.tau, tau);
      w = compose(std::move(w), std::move(post));
    }
    return w;
  }

  RetractWitness node(const LpsDerivation& d) {
    switch (d.rule) {
      case LpsRule::A1: {
        if (d.rho == d.tau) {
          RetractWitness w;
          w.rho = d.rho;
          w.tau = d.tau;
          w.main_var = supply.fresh("x");
          w.coder = Term::var(w.main_var);
          std::string f = supply.fresh("f");
          w.decoder = Term::abs(f, d.rho, Term::var(f));
          return w;
        }
        return iso_witness(d.rho, d.tau);
      }
      case LpsRule::A2: {
        RetractWitness w;
        w.rho = d.rho;
        w.tau = Type::arrow(d.added, d.rho);
        w.main_var = supply.fresh("x");
        std::string y = supply.fresh("y");
        w.coder = Term::abs(y, d.added, Term::var(w.main_var));
        std::string f = supply.fresh("f");
        std::string e = supply.fresh("E");
        w.decoder = Term::abs(f, w.tau, Term::app(Term::var(f), Term::var(e)));
        w.env = {{e, d.added}};
        return adapt(std::move(w), d.rho, d.tau);
      }
      case LpsRule::A4: {
        const Type& sigma = d.rho;
        Type a = Type::atom(sigma.head());
        Type sa = Type::arrow(sigma, a);
        RetractWitness w;
        w.rho = sigma;
        w.tau = Type::arrow(sa, a);
        w.main_var = supply.fresh("x");
        std::string k = supply.fresh("k");
        w.coder = Term::abs(k, sa, Term::app(Term::var(k), Term::var(w.main_var)));
        std::string f = supply.fresh("f");
        std::string s = supply.fresh("s");
        std::vector<std::pair<std::string, Type>> zs;
        for (const Type& st : sigma.spine_args()) zs.emplace_back(supply.fresh("z"), st);
        Term sbody = Term::var(s);
        for (const auto& [zn, zt] : zs) {
          (void)zt;
          sbody = Term::app(sbody, Term::var(zn));
        }
        Term dbody = Term::app(Term::var(f), Term::abs(s, sigma, sbody));
        for (auto it = zs.rbegin(); it != zs.rend(); ++it)
          dbody = Term::abs(it->first, it->second, dbody);
        w.decoder = Term::abs(f, w.tau, dbody);
        return adapt(std::move(w), d.rho, d.tau);
      }
      case LpsRule::R1: {
        RetractWitness w1 = node(d.premises[0]);
        RetractWitness w2 = node(d.premises[1]);
        if (w1.tau != w2.rho) {
          RetractWitness bridge = iso_witness(w1.tau, w2.rho);
          w1 = compose(std::move(w1), std::move(bridge));
        }
        return adapt(compose(std::move(w1), std::move(w2)), d.rho, d.tau);
      }
      case LpsRule::R2: {
        RetractWitness w1 = node(d.premises[0]);  // s <= s'
        RetractWitness w2 = node(d.premises[1]);  // t <= t'
        RetractWitness w;
        w.rho = Type::arrow(w1.rho, w2.rho);
        w.tau = Type::arrow(w1.tau, w2.tau);
        w.main_var = supply.fresh("x");
        // coder: \s':s'. C2[x2 := x (D1 s')]
        std::string sp = supply.fresh("s");
        Term conv = Term::app(w1.decoder, Term::var(sp));
        Term cbody = subst(w2.coder, w2.main_var, Term::app(Term::var(w.main_var), conv));
        w.coder = Term::abs(sp, w1.tau, cbody);
        // decoder: \f:s'->t'. \w:s. D2 (f C1[x1 := w])
        std::string f = supply.fresh("f");
        std::string sv = supply.fresh("w");
        Term c1 = subst(w1.coder, w1.main_var, Term::var(sv));
        Term dbody = Term::app(w2.decoder, Term::app(Term::var(f), c1));
        w.decoder = Term::abs(f, w.tau, Term::abs(sv, w1.rho, dbody));
        w.env = merged(std::move(w1.env), w2.env);
        return adapt(std::move(w), d.rho, d.tau);
      }
    }
    throw invalid_derivation("unreachable rule");
  }
};

}  // namespace detail

inline RetractWitness synthesize_witness(const LpsDerivation& d) {
  CheckResult r = check_lps(d);
  if (!r.ok) throw invalid_derivation("synthesize_witness: " + r.error);
  detail::WitnessSynth synth;
  RetractWitness w = synth.node(d);
  w.coder = beta_normalize(w.coder);
  w.decoder = beta_normalize(w.decoder);
  std::set<std::string> used = free_vars(w.coder);
  std::set<std::string> fd = free_vars(w.decoder);
  used.insert(fd.begin(), fd.end());
  for (auto it = w.env.begin(); it != w.env.end();)
    it = used.count(it->first) ? std::next(it) : w.env.erase(it);
  return w;
}

// decide + translate + synthesize in one step
struct AffineResult {
  CfDerivation derivation;
  LpsDerivation lps;
  RetractWitness witness;
};

inline std::optional<AffineResult> synthesize_affine(const Type& rho, const Type& tau,
                                                     long max_nodes = default_search_nodes) {
  AffineSearcher s(max_nodes);
  std::optional<CfDerivation> cf = s.decide(rho, tau);
  if (!cf) return std::nullopt;
  AffineResult r;
  r.derivation = std::move(*cf);
  r.lps = lps_from_cf(r.derivation);
  r.witness = synthesize_witness(r.lps);
  return r;
}

}  // namespace retracts
