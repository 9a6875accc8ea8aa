#pragma once

// Simple types over lowercase atoms, plus the tree view used by the
// retractability checks: spines, rank, root-to-leaf path words, parts
// under a path, delayed arguments, canonical forms and word embedding.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace retracts {

struct parse_error : std::runtime_error {
  std::size_t position;
  parse_error(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
};

// Immutable type expression: atom or arrow.  Copies share structure.
class Type {
 public:
  Type() = default;

  static Type atom(std::string name) {
    auto n = std::make_shared<Node>();
    n->name = std::move(name);
    n->atoms = 1;
    n->rk = 0;
    return Type(std::move(n));
  }

  static Type arrow(const Type& argument, const Type& result) {
    assert(argument && result);
    auto n = std::make_shared<Node>();
    n->arg = argument.n_;
    n->res = result.n_;
    n->atoms = argument.atom_count() + result.atom_count();
    // rank(t1 -> ... -> tn -> a) = 1 + max rank(ti); unfolds to this
    // two-place recursion because `result` carries the rest of the spine.
    n->rk = std::max(argument.rank() + 1, result.rank());
    return Type(std::move(n));
  }

  // args -> tail, right associated.
  static Type arrow_chain(const std::vector<Type>& args, const Type& tail) {
    Type t = tail;
    for (auto it = args.rbegin(); it != args.rend(); ++it) t = arrow(*it, t);
    return t;
  }

  explicit operator bool() const { return n_ != nullptr; }

  bool is_atom() const { return n_ && !n_->arg; }
  bool is_arrow() const { return n_ && n_->arg != nullptr; }

  const std::string& name() const {
    assert(is_atom());
    return n_->name;
  }
  Type argument() const {
    assert(is_arrow());
    return Type(n_->arg);
  }
  Type result() const {
    assert(is_arrow());
    return Type(n_->res);
  }

  int atom_count() const {
    assert(n_);
    return n_->atoms;
  }
  int rank() const {
    assert(n_);
    return n_->rk;
  }

  // The head atom: head(t1 -> ... -> tn -> a) = a.
  const std::string& head() const {
    assert(n_);
    const Node* p = n_.get();
    while (p->arg) p = p->res.get();
    return p->name;
  }

  // The argument list of the spine: [t1, ..., tn] for t1 -> ... -> tn -> a.
  std::vector<Type> spine_args() const {
    assert(n_);
    std::vector<Type> out;
    const Node* p = n_.get();
    while (p->arg) {
      out.push_back(Type(p->arg));
      p = p->res.get();
    }
    return out;
  }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.n_ == b.n_) return true;
    if (!a.n_ || !b.n_) return false;
    return equal(a.n_.get(), b.n_.get());
  }
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node {
    std::string name;                    // atom name (leaf only)
    std::shared_ptr<const Node> arg, res;  // both set iff arrow
    int atoms = 0;
    int rk = 0;
  };

  explicit Type(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  static bool equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if ((a->arg == nullptr) != (b->arg == nullptr)) return false;
    if (!a->arg) return a->name == b->name;
    if (a->atoms != b->atoms) return false;
    return equal(a->arg.get(), b->arg.get()) && equal(a->res.get(), b->res.get());
  }

  std::shared_ptr<const Node> n_;
};

inline void print_type(const Type& t, std::string& out) {
  if (t.is_atom()) {
    out += t.name();
    return;
  }
  Type a = t.argument();
  if (a.is_arrow()) {
    out += '(';
    print_type(a, out);
    out += ')';
  } else {
    print_type(a, out);
  }
  out += "->";
  print_type(t.result(), out);
}

inline std::string to_string(const Type& t) {
  std::string out;
  print_type(t, out);
  return out;
}

// Grammar: type ::= atom | type "->" type | "(" type ")", with "->" right
// associative, atoms matching [a-z][a-z0-9]*, whitespace insignificant.
namespace detail {

struct TypeParser {
  const std::string& s;
  std::size_t pos = 0;

  explicit TypeParser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' || s[pos] == '\r'))
      ++pos;
  }

  bool at_atom_start() const { return pos < s.size() && s[pos] >= 'a' && s[pos] <= 'z'; }

  std::string atom_name() {
    std::size_t start = pos;
    ++pos;
    while (pos < s.size() &&
           ((s[pos] >= 'a' && s[pos] <= 'z') || (s[pos] >= '0' && s[pos] <= '9')))
      ++pos;
    return s.substr(start, pos - start);
  }

  Type parse_unit() {
    skip_ws();
    if (pos >= s.size()) throw parse_error("expected type", pos);
    if (s[pos] == '(') {
      ++pos;
      Type t = parse_type();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') throw parse_error("expected ')'", pos);
      ++pos;
      return t;
    }
    if (at_atom_start()) return Type::atom(atom_name());
    throw parse_error(std::string("unexpected character '") + s[pos] + "' in type", pos);
  }

  Type parse_type() {
    Type left = parse_unit();
    skip_ws();
    if (pos + 1 < s.size() && s[pos] == '-' && s[pos + 1] == '>') {
      pos += 2;
      return Type::arrow(left, parse_type());
    }
    return left;
  }
};

}  // namespace detail

inline Type parse_type(const std::string& text) {
  detail::TypeParser p(text);
  Type t = p.parse_type();
  p.skip_ws();
  if (p.pos != text.size()) throw parse_error("trailing input after type", p.pos);
  return t;
}

// Tree view: tree(t1 -> ... -> tn -> a) has root labelled a with the trees
// of t1..tn as children.  Atoms are leaves.  Its depth equals rank.
struct TypeTree {
  std::string label;
  std::vector<TypeTree> children;

  int depth() const {
    int d = 0;
    for (const auto& c : children) d = std::max(d, 1 + c.depth());
    return d;
  }
  int node_count() const {
    int n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
  }
};

inline TypeTree tree(const Type& t) {
  TypeTree out;
  out.label = t.head();
  for (const Type& a : t.spine_args()) out.children.push_back(tree(a));
  return out;
}

// A path word lists the labels along a tree path in root-first order.
using PathWord = std::vector<std::string>;

inline std::string to_string(const PathWord& w) {
  std::string out;
  for (const std::string& letter : w) {
    if (!out.empty()) out += ' ';
    out += letter;
  }
  return out;
}

inline void collect_paths(const TypeTree& tr, PathWord& prefix, std::vector<PathWord>& out) {
  prefix.push_back(tr.label);
  if (tr.children.empty()) {
    out.push_back(prefix);
  } else {
    for (const auto& c : tr.children) collect_paths(c, prefix, out);
  }
  prefix.pop_back();
}

// All root-to-leaf path words of tree(t), children left to right.
inline std::vector<PathWord> paths(const Type& t) {
  std::vector<PathWord> out;
  PathWord prefix;
  collect_paths(tree(t), prefix, out);
  return out;
}

// Parts of t under path word w (root-first): the direct arguments sit under
// the one-letter path [head(t)]; parts of an argument under w sit under
// [head(t)] ++ w.  Empty when w does not start with head(t).
inline std::vector<Type> parts_under(const Type& t, const PathWord& w) {
  std::vector<Type> out;
  if (w.empty() || w.front() != t.head()) return out;
  std::vector<Type> args = t.spine_args();
  if (w.size() == 1) return args;
  PathWord rest(w.begin() + 1, w.end());
  for (const Type& a : args) {
    std::vector<Type> sub = parts_under(a, rest);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

// Delayed arguments: parts of t under a^k for odd k, where a = head(t).
// Returned with their k; parts at even depth are deliberately absent.
inline std::vector<std::pair<Type, int>> delayed_arguments(const Type& t) {
  std::vector<std::pair<Type, int>> out;
  const std::string& a = t.head();
  for (int k = 1; k <= t.rank(); k += 2) {
    PathWord w(static_cast<std::size_t>(k), a);
    for (const Type& part : parts_under(t, w)) out.emplace_back(part, k);
  }
  return out;
}

// Total order used to sort argument lists in canonical forms: by atom count,
// then lexicographically on the printed form.  On canonical inputs this is a
// total order on isomorphism classes.
inline bool type_less(const Type& a, const Type& b) {
  if (a.atom_count() != b.atom_count()) return a.atom_count() < b.atom_count();
  return to_string(a) < to_string(b);
}

// Canonical representative of the isomorphism class of t: every argument
// list is canonicalized recursively and sorted under type_less.
inline Type canonicalize(const Type& t) {
  if (t.is_atom()) return t;
  std::vector<Type> args = t.spine_args();
  for (Type& a : args) a = canonicalize(a);
  std::stable_sort(args.begin(), args.end(), type_less);
  return Type::arrow_chain(args, Type::atom(t.head()));
}

inline std::string canon_key(const Type& t) { return to_string(canonicalize(t)); }

// Type isomorphism: equality up to permuting argument lists at every level.
inline bool iso(const Type& a, const Type& b) {
  if (a == b) return true;
  if (a.atom_count() != b.atom_count() || a.rank() != b.rank()) return false;
  return canonicalize(a) == canonicalize(b);
}

// Word embedding: the reflexive-transitive closure of the single step that
// replaces one occurrence of a letter x by xxx.  Equivalently, v splits into
// |w| consecutive blocks, the i-th being w[i] repeated an odd number of
// times.  Decided by memoized recursion on (i, j) positions.
inline bool word_embed(const PathWord& w, const PathWord& v) {
  const std::size_t n = w.size(), m = v.size();
  if (m < n || (m - n) % 2 != 0) return false;
  // memo: 0 unknown, 1 yes, 2 no
  std::vector<unsigned char> memo((n + 1) * (m + 1), 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> bool {
    if (i == n) return j == m;
    if (j == m) return false;
    unsigned char& cell = memo[i * (m + 1) + j];
    if (cell) return cell == 1;
    bool ok = false;
    if (w[i] == v[j]) {
      // block of odd length l >= 1 of the letter w[i]
      for (std::size_t l = 1; j + l <= m && v[j + l - 1] == w[i]; l += 2) {
        if (self(self, i + 1, j + l)) {
          ok = true;
          break;
        }
        if (j + l == m || v[j + l] != w[i]) break;
      }
    }
    cell = ok ? 1 : 2;
    return ok;
  };
  return rec(rec, 0, 0);
}

// Embedding into some prefix of v: as above, but the blocks only need to
// cover an initial segment.  This is the right test for paths of a tree
// that may stop above a leaf.
inline bool word_embed_prefix(const PathWord& w, const PathWord& v) {
  const std::size_t n = w.size(), m = v.size();
  if (m < n) return false;
  std::vector<unsigned char> memo((n + 1) * (m + 1), 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> bool {
    if (i == n) return true;  // whatever follows position j is beyond the prefix
    if (j == m) return false;
    unsigned char& cell = memo[i * (m + 1) + j];
    if (cell) return cell == 1;
    bool ok = false;
    if (w[i] == v[j]) {
      for (std::size_t l = 1; j + l <= m && v[j + l - 1] == w[i]; l += 2) {
        if (self(self, i + 1, j + l)) {
          ok = true;
          break;
        }
        if (j + l == m || v[j + l] != w[i]) break;
      }
    }
    cell = ok ? 1 : 2;
    return ok;
  };
  return rec(rec, 0, 0);
}

}  // namespace retracts
