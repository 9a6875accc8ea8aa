#pragma once

// Church-style lambda terms over simple types: parsing, printing,
// substitution, typechecking, beta normalization, long normal forms,
// beta-eta equality, affinity, and checking of retraction witnesses.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "retracts/types.hpp"

namespace retracts {

struct type_error : std::runtime_error {
  explicit type_error(const std::string& what) : std::runtime_error(what) {}
};

class Term {
 public:
  enum class Kind { Var, Abs, App };

  Term() = default;

  static Term var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->name = std::move(name);
    return Term(std::move(n));
  }
  static Term abs(std::string binder, const Type& ty, const Term& body) {
    assert(ty && body);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Abs;
    n->name = std::move(binder);
    n->ty = ty;
    n->left = body.n_;
    return Term(std::move(n));
  }
  static Term app(const Term& fn, const Term& arg) {
    assert(fn && arg);
    auto n = std::make_shared<Node>();
    n->kind = Kind::App;
    n->left = fn.n_;
    n->right = arg.n_;
    return Term(std::move(n));
  }
  // fn applied to args, left associated.
  static Term apply(Term fn, const std::vector<Term>& args) {
    for (const Term& a : args) fn = app(fn, a);
    return fn;
  }

  explicit operator bool() const { return n_ != nullptr; }
  Kind kind() const {
    assert(n_);
    return n_->kind;
  }
  bool is_var() const { return n_ && n_->kind == Kind::Var; }
  bool is_abs() const { return n_ && n_->kind == Kind::Abs; }
  bool is_app() const { return n_ && n_->kind == Kind::App; }

  const std::string& name() const {
    assert(is_var() || is_abs());
    return n_->name;
  }
  const Type& binder_type() const {
    assert(is_abs());
    return n_->ty;
  }
  Term body() const {
    assert(is_abs());
    return Term(n_->left);
  }
  Term fn() const {
    assert(is_app());
    return Term(n_->left);
  }
  Term arg() const {
    assert(is_app());
    return Term(n_->right);
  }

  int node_count() const {
    if (!n_) return 0;
    switch (n_->kind) {
      case Kind::Var: return 1;
      case Kind::Abs: return 1 + body().node_count();
      case Kind::App: return 1 + fn().node_count() + arg().node_count();
    }
    return 0;
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_ || a.n_->kind != b.n_->kind) return false;
    switch (a.n_->kind) {
      case Kind::Var: return a.n_->name == b.n_->name;
      case Kind::Abs:
        return a.n_->name == b.n_->name && a.n_->ty == b.n_->ty && a.body() == b.body();
      case Kind::App: return a.fn() == b.fn() && a.arg() == b.arg();
    }
    return false;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind = Kind::Var;
    std::string name;  // Var name or Abs binder
    Type ty;           // Abs binder type
    std::shared_ptr<const Node> left;   // Abs body or App fn
    std::shared_ptr<const Node> right;  // App arg
  };
  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

using TypeEnv = std::map<std::string, Type>;

// ---------------------------------------------------------------- printing

inline void print_term(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += t.name();
      break;
    case Term::Kind::Abs:
      out += '\\';
      out += t.name();
      out += ':';
      print_type(t.binder_type(), out);
      out += ". ";
      print_term(t.body(), out);
      break;
    case Term::Kind::App: {
      Term f = t.fn();
      if (f.is_abs()) {
        out += '(';
        print_term(f, out);
        out += ')';
      } else {
        print_term(f, out);
      }
      out += ' ';
      Term a = t.arg();
      if (a.is_var()) {
        print_term(a, out);
      } else {
        out += '(';
        print_term(a, out);
        out += ')';
      }
      break;
    }
  }
}

inline std::string to_string(const Term& t) {
  std::string out;
  print_term(t, out);
  return out;
}

// ----------------------------------------------------------------- parsing
// term ::= var | "\" var ":" type "." term | term term | "(" term ")"
// Application is left associative; a lambda body extends as far right as
// possible; lambdas in argument position need parentheses.

namespace detail {

struct TermParser {
  const std::string& s;
  std::size_t pos = 0;

  explicit TermParser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r'))
      ++pos;
  }

  static bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9');
  }

  std::string ident() {
    std::size_t start = pos;
    ++pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }

  Type annotation() {
    TypeParser tp(s);
    tp.pos = pos;
    Type t = tp.parse_type();
    pos = tp.pos;
    return t;
  }

  // var or parenthesized term; nothing otherwise
  std::optional<Term> try_atom() {
    skip_ws();
    if (pos >= s.size()) return std::nullopt;
    if (s[pos] == '(') {
      ++pos;
      Term t = parse_term();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') throw parse_error("expected ')'", pos);
      ++pos;
      return t;
    }
    if (ident_start(s[pos])) return Term::var(ident());
    return std::nullopt;
  }

  Term parse_term() {
    skip_ws();
    if (pos < s.size() && s[pos] == '\\') {
      ++pos;
      skip_ws();
      if (pos >= s.size() || !ident_start(s[pos])) throw parse_error("expected binder name", pos);
      std::string binder = ident();
      skip_ws();
      if (pos >= s.size() || s[pos] != ':') throw parse_error("expected ':' after binder", pos);
      ++pos;
      Type ty = annotation();
      skip_ws();
      if (pos >= s.size() || s[pos] != '.') throw parse_error("expected '.' after binder type", pos);
      ++pos;
      return Term::abs(std::move(binder), ty, parse_term());
    }
    std::optional<Term> head = try_atom();
    if (!head) throw parse_error("expected term", pos);
    Term t = *head;
    while (true) {
      std::optional<Term> next = try_atom();
      if (!next) break;
      t = Term::app(t, *next);
    }
    return t;
  }
};

}  // namespace detail

inline Term parse_term(const std::string& text) {
  detail::TermParser p(text);
  Term t = p.parse_term();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input after term", p.pos);
  return t;
}

// ------------------------------------------------------------ substitution

inline void collect_free_vars(const Term& t, std::set<std::string>& bound,
                              std::set<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (!bound.count(t.name())) out.insert(t.name());
      break;
    case Term::Kind::Abs: {
      bool fresh = bound.insert(t.name()).second;
      collect_free_vars(t.body(), bound, out);
      if (fresh) bound.erase(t.name());
      break;
    }
    case Term::Kind::App:
      collect_free_vars(t.fn(), bound, out);
      collect_free_vars(t.arg(), bound, out);
      break;
  }
}

inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> bound, out;
  collect_free_vars(t, bound, out);
  return out;
}

inline void collect_names(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out.insert(t.name());
      break;
    case Term::Kind::Abs:
      out.insert(t.name());
      collect_names(t.body(), out);
      break;
    case Term::Kind::App:
      collect_names(t.fn(), out);
      collect_names(t.arg(), out);
      break;
  }
}

// Fresh-name source.  Used names are tracked so a supply can be seeded with
// everything already present in the terms at hand.
struct NameSupply {
  std::set<std::string> used;
  int counter = 0;

  void avoid(const Term& t) { collect_names(t, used); }
  void avoid(const std::string& n) { used.insert(n); }

  std::string fresh(const std::string& prefix) {
    std::string cand;
    do {
      cand = prefix + std::to_string(++counter);
    } while (used.count(cand));
    used.insert(cand);
    return cand;
  }
};

// Capture-avoiding substitution t[x := r].
inline Term subst(const Term& t, const std::string& x, const Term& r) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t.name() == x ? r : t;
    case Term::Kind::Abs: {
      if (t.name() == x) return t;  // x shadowed
      std::set<std::string> fv_r = free_vars(r);
      if (!fv_r.count(t.name())) {
        Term b = subst(t.body(), x, r);
        return b == t.body() ? t : Term::abs(t.name(), t.binder_type(), b);
      }
      // binder would capture a free variable of r: rename it first
      NameSupply supply;
      supply.used = std::move(fv_r);
      supply.avoid(t.body());
      supply.avoid(x);
      std::string b2 = supply.fresh(t.name());
      Term renamed = subst(t.body(), t.name(), Term::var(b2));
      return Term::abs(b2, t.binder_type(), subst(renamed, x, r));
    }
    case Term::Kind::App: {
      Term f = subst(t.fn(), x, r);
      Term a = subst(t.arg(), x, r);
      if (f == t.fn() && a == t.arg()) return t;
      return Term::app(f, a);
    }
  }
  return t;
}

// ------------------------------------------------------------- alpha, beta

inline bool alpha_equal_rec(const Term& a, const Term& b,
                            std::vector<std::pair<std::string, std::string>>& binders) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: {
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
        bool la = it->first == a.name(), lb = it->second == b.name();
        if (la || lb) return la && lb;
      }
      return a.name() == b.name();
    }
    case Term::Kind::Abs: {
      if (a.binder_type() != b.binder_type()) return false;
      binders.emplace_back(a.name(), b.name());
      bool ok = alpha_equal_rec(a.body(), b.body(), binders);
      binders.pop_back();
      return ok;
    }
    case Term::Kind::App:
      return alpha_equal_rec(a.fn(), b.fn(), binders) &&
             alpha_equal_rec(a.arg(), b.arg(), binders);
  }
  return false;
}

inline bool alpha_equal(const Term& a, const Term& b) {
  std::vector<std::pair<std::string, std::string>> binders;
  return alpha_equal_rec(a, b, binders);
}

// Normal-order beta normalization.  Terminates on well-typed terms.
inline Term whnf(const Term& t) {
  if (!t.is_app()) return t;
  Term f = whnf(t.fn());
  if (f.is_abs()) return whnf(subst(f.body(), f.name(), t.arg()));
  if (f == t.fn()) return t;
  return Term::app(f, t.arg());
}

inline Term beta_normalize(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t;
    case Term::Kind::Abs: {
      Term b = beta_normalize(t.body());
      return b == t.body() ? t : Term::abs(t.name(), t.binder_type(), b);
    }
    case Term::Kind::App: {
      Term f = whnf(t.fn());
      if (f.is_abs()) return beta_normalize(subst(f.body(), f.name(), t.arg()));
      Term nf = beta_normalize(f);
      Term na = beta_normalize(t.arg());
      if (nf == t.fn() && na == t.arg()) return t;
      return Term::app(nf, na);
    }
  }
  return t;
}

// Eta contraction to eta-normal form: \x. M x  ~>  M  when x not free in M.
// On beta-normal input the result is the (unique up to alpha) beta-eta
// normal form; contraction cannot create beta redexes there because the
// applied subterm of an eta redex in a beta-normal term is never an
// abstraction.
inline Term eta_reduce(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var:
      return t;
    case Term::Kind::App: {
      Term f = eta_reduce(t.fn());
      Term a = eta_reduce(t.arg());
      if (f == t.fn() && a == t.arg()) return t;
      return Term::app(f, a);
    }
    case Term::Kind::Abs: {
      Term b = eta_reduce(t.body());
      if (b.is_app() && b.arg().is_var() && b.arg().name() == t.name() &&
          !free_vars(b.fn()).count(t.name())) {
        return eta_reduce(b.fn());
      }
      return b == t.body() ? t : Term::abs(t.name(), t.binder_type(), b);
    }
  }
  return t;
}

inline Term beta_eta_normal(const Term& t) { return eta_reduce(beta_normalize(t)); }

// ------------------------------------------------------------ typechecking

inline Type typecheck(const TypeEnv& env, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = env.find(t.name());
      if (it == env.end()) throw type_error("unbound variable: " + t.name());
      return it->second;
    }
    case Term::Kind::Abs: {
      TypeEnv inner = env;
      inner[t.name()] = t.binder_type();
      Type body_ty = typecheck(inner, t.body());
      return Type::arrow(t.binder_type(), body_ty);
    }
    case Term::Kind::App: {
      Type fn_ty = typecheck(env, t.fn());
      Type arg_ty = typecheck(env, t.arg());
      if (!fn_ty.is_arrow())
        throw type_error("applied non-function of type " + to_string(fn_ty) + " in " +
                         to_string(t));
      if (fn_ty.argument() != arg_ty)
        throw type_error("argument type mismatch: expected " + to_string(fn_ty.argument()) +
                         ", got " + to_string(arg_ty) + " in " + to_string(t));
      return fn_ty.result();
    }
  }
  throw type_error("malformed term");
}

// ------------------------------------------------------- long normal forms

namespace detail {

inline void spine_of(const Term& t, Term& head, std::vector<Term>& args) {
  if (t.is_app()) {
    spine_of(t.fn(), head, args);
    args.push_back(t.arg());
  } else {
    head = t;
  }
}

// Eta-expand the beta-normal term n of type ty so every subterm of arrow
// type is fully applied under its own lambdas.
inline Term expand_lnf(TypeEnv env, const Term& n, const Type& ty, NameSupply& supply) {
  std::vector<Type> want = ty.spine_args();
  std::vector<std::pair<std::string, Type>> binders;
  Term cur = n;
  std::size_t i = 0;
  for (; i < want.size() && cur.is_abs(); ++i) {
    binders.emplace_back(cur.name(), cur.binder_type());
    env[cur.name()] = cur.binder_type();
    cur = cur.body();
  }
  for (; i < want.size(); ++i) {
    std::string z = supply.fresh("z");
    binders.emplace_back(z, want[i]);
    env[z] = want[i];
    cur = Term::app(cur, Term::var(z));
  }

  Term head;
  std::vector<Term> args;
  spine_of(cur, head, args);
  if (!head.is_var())
    throw type_error("not beta-normal while eta-expanding: " + to_string(cur));
  auto it = env.find(head.name());
  if (it == env.end()) throw type_error("unbound variable: " + head.name());
  std::vector<Type> head_args = it->second.spine_args();
  if (head_args.size() != args.size())
    throw type_error("under-applied head while eta-expanding: " + to_string(cur));

  Term out = head;
  for (std::size_t j = 0; j < args.size(); ++j)
    out = Term::app(out, expand_lnf(env, args[j], head_args[j], supply));
  for (auto bit = binders.rbegin(); bit != binders.rend(); ++bit)
    out = Term::abs(bit->first, bit->second, out);
  return out;
}

}  // namespace detail

// Long normal form: beta-normal and fully eta-expanded.  Requires m to be
// well typed under env.
inline Term long_normal_form(const TypeEnv& env, const Term& m) {
  Term n = beta_normalize(m);
  Type ty = typecheck(env, n);
  NameSupply supply;
  supply.avoid(n);
  for (const auto& [k, v] : env) {
    (void)v;
    supply.avoid(k);
  }
  return detail::expand_lnf(env, n, ty, supply);
}

// Beta-eta equality, decided by comparing long normal forms up to alpha.
// Throws if either side is ill typed or their types differ.
inline bool beta_eta_equal(const TypeEnv& env, const Term& m, const Term& n) {
  Type tm = typecheck(env, m);
  Type tn = typecheck(env, n);
  if (tm != tn)
    throw type_error("beta_eta_equal on terms of different types: " + to_string(tm) + " vs " +
                     to_string(tn));
  return alpha_equal(long_normal_form(env, m), long_normal_form(env, n));
}

// ---------------------------------------------------------------- affinity

namespace detail {

struct AffineScan {
  std::map<std::string, std::vector<int>> scopes;  // name -> stack of binder ids
  std::vector<int> bound_counts;
  std::map<std::string, int> free_counts;
  bool ok = true;

  void walk(const Term& t) {
    if (!ok) return;
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto it = scopes.find(t.name());
        if (it != scopes.end() && !it->second.empty()) {
          if (++bound_counts[it->second.back()] > 1) ok = false;
        } else {
          if (++free_counts[t.name()] > 1) ok = false;
        }
        break;
      }
      case Term::Kind::Abs: {
        int id = static_cast<int>(bound_counts.size());
        bound_counts.push_back(0);
        scopes[t.name()].push_back(id);
        walk(t.body());
        scopes[t.name()].pop_back();
        break;
      }
      case Term::Kind::App:
        walk(t.fn());
        walk(t.arg());
        break;
    }
  }
};

}  // namespace detail

// True iff every variable, free or bound, occurs at most once in t.
// Binders with no occurrence are fine.
inline bool is_affine(const Term& t) {
  detail::AffineScan scan;
  scan.walk(t);
  return scan.ok;
}

// ------------------------------------------------------ retraction witness

// A witness that rho is a retract of tau: under env extended with
// main_var : rho the coder has type tau, the decoder has type tau -> rho and
// does not mention main_var, and decoder applied to coder is beta-eta equal
// to main_var.
struct RetractWitness {
  Type rho, tau;
  Term coder, decoder;
  TypeEnv env;
  std::string main_var;
};

struct WitnessReport {
  bool coder_well_typed = false;
  bool decoder_well_typed = false;
  bool round_trip = false;
  bool main_var_absent = false;
  bool coder_affine = false;
  bool decoder_affine = false;
  std::string failure;  // first failed condition, empty when ok()
  Term round_trip_lnf;  // long normal form of decoder applied to coder

  bool ok() const {
    return coder_well_typed && decoder_well_typed && round_trip && main_var_absent;
  }
  bool affine() const { return coder_affine && decoder_affine; }
};

inline WitnessReport verify_witness(const RetractWitness& w) {
  WitnessReport r;
  r.coder_affine = is_affine(w.coder);
  r.decoder_affine = is_affine(w.decoder);

  if (w.env.count(w.main_var)) {
    r.failure = "env already binds the main variable " + w.main_var;
    return r;
  }
  TypeEnv with_main = w.env;
  with_main[w.main_var] = w.rho;

  try {
    Type ct = typecheck(with_main, w.coder);
    if (ct != w.tau) {
      r.failure = "coder has type " + to_string(ct) + ", expected " + to_string(w.tau);
      return r;
    }
    r.coder_well_typed = true;
  } catch (const type_error& e) {
    r.failure = std::string("coder: ") + e.what();
    return r;
  }

  try {
    Type dt = typecheck(w.env, w.decoder);
    Type want = Type::arrow(w.tau, w.rho);
    if (dt != want) {
      r.failure = "decoder has type " + to_string(dt) + ", expected " + to_string(want);
      return r;
    }
    r.decoder_well_typed = true;
  } catch (const type_error& e) {
    r.failure = std::string("decoder: ") + e.what();
    return r;
  }

  r.main_var_absent = free_vars(w.decoder).count(w.main_var) == 0;
  if (!r.main_var_absent) {
    r.failure = "main variable " + w.main_var + " occurs free in the decoder";
    return r;
  }

  Term round = Term::app(w.decoder, w.coder);
  r.round_trip_lnf = long_normal_form(with_main, round);
  r.round_trip = alpha_equal(r.round_trip_lnf, long_normal_form(with_main, Term::var(w.main_var)));
  if (!r.round_trip) {
    r.failure = "decoder applied to coder reduces to " + to_string(r.round_trip_lnf) +
                ", not to " + w.main_var;
    return r;
  }
  return r;
}

}  // namespace retracts
