#include "retracts/types.hpp"

#include <algorithm>
#include <set>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"

using namespace retracts;

static Type T(const std::string& s) { return parse_type(s); }

TEST_CASE("type parsing and printing round-trip") {
  CHECK(to_string(T("a->b->c")) == "a->b->c");
  CHECK(T("a->b->c") == Type::arrow(T("a"), Type::arrow(T("b"), T("c"))));
  CHECK(T("(a->b)->c") != T("a->b->c"));
  CHECK(to_string(T("(a->b)->c")) == "(a->b)->c");
  CHECK(T("  a ->\tb ") == T("a->b"));
  CHECK(T("a1->b2x") == Type::arrow(Type::atom("a1"), Type::atom("b2x")));
  CHECK(to_string(T("((b->a)->a)->a")) == "((b->a)->a)->a");

  CHECK_THROWS_AS(T("a->"), parse_error);
  CHECK_THROWS_AS(T("->a"), parse_error);
  CHECK_THROWS_AS(T("(a"), parse_error);
  CHECK_THROWS_AS(T("a)"), parse_error);
  CHECK_THROWS_AS(T(""), parse_error);
  CHECK_THROWS_AS(T("A->b"), parse_error);
  CHECK_THROWS_AS(T("a => b"), parse_error);
}

TEST_CASE("spine, head and rank") {
  Type t = T("a->b->c");
  CHECK(t.head() == "c");
  auto args = t.spine_args();
  REQUIRE(args.size() == 2);
  CHECK(args[0] == T("a"));
  CHECK(args[1] == T("b"));

  CHECK(T("a").rank() == 0);
  CHECK(T("a->b").rank() == 1);
  CHECK(T("(a->b)->c").rank() == 2);
  CHECK(T("((a->a)->a)->a").rank() == 3);
  CHECK(T("a->(b->c)->d").rank() == 2);

  CHECK(T("((b->a)->a)->a").atom_count() == 4);
}

TEST_CASE("tree view and path words") {
  // (a->b)->(a->c)->d->a: root a with subtrees for the three arguments
  Type t = T("(a->b)->(a->c)->d->a");
  TypeTree tr = tree(t);
  CHECK(tr.label == "a");
  REQUIRE(tr.children.size() == 3);
  CHECK(tr.depth() == t.rank());

  auto ps = paths(t);
  std::set<PathWord> got(ps.begin(), ps.end());
  std::set<PathWord> want = {{"a", "b", "a"}, {"a", "c", "a"}, {"a", "d"}};
  CHECK(got == want);

  CHECK(paths(T("a")) == std::vector<PathWord>{{"a"}});
}

TEST_CASE("parts under a path") {
  Type t = T("((b->a)->a)->a");
  auto p1 = parts_under(t, {"a"});
  REQUIRE(p1.size() == 1);
  CHECK(p1[0] == T("(b->a)->a"));

  auto p2 = parts_under(t, {"a", "a"});
  REQUIRE(p2.size() == 1);
  CHECK(p2[0] == T("b->a"));

  CHECK(parts_under(t, {"a", "b"}).empty());
  CHECK(parts_under(t, {"b"}).empty());
  CHECK(parts_under(t, {}).empty());
  auto p3 = parts_under(t, {"a", "a", "a"});
  REQUIRE(p3.size() == 1);
  CHECK(p3[0] == T("b"));
}

TEST_CASE("delayed arguments pick odd depths only") {
  Type t = T("((b->a)->a)->a");
  auto d = delayed_arguments(t);
  REQUIRE(d.size() == 2);
  CHECK(d[0].first == T("(b->a)->a"));
  CHECK(d[0].second == 1);
  CHECK(d[1].first == T("b"));
  CHECK(d[1].second == 3);
  // b->a sits at depth 2 and must not appear
  for (const auto& [ty, k] : d) CHECK(ty != T("b->a"));
}

TEST_CASE("canonical forms and isomorphism") {
  CHECK(canonicalize(T("a->b->c")) == canonicalize(T("b->a->c")));
  CHECK(iso(T("a->b->c"), T("b->a->c")));
  CHECK_FALSE(iso(T("a->b"), T("b->a")));
  CHECK(iso(T("(a->b->c)->d"), T("(b->a->c)->d")));
  CHECK_FALSE(iso(T("a->a->c"), T("a->c")));
  CHECK(canonicalize(T("a")) == T("a"));
}

TEST_CASE("word embedding") {
  CHECK(word_embed({"b", "a"}, {"b", "a", "a", "a"}));
  CHECK_FALSE(word_embed({"a"}, {"a", "a"}));
  CHECK_FALSE(word_embed({"a", "b"}, {"b", "a"}));
  CHECK(word_embed({"a"}, {"a", "a", "a"}));
  CHECK(word_embed({"a", "a"}, {"a", "a", "a", "a"}));
  CHECK_FALSE(word_embed({"a", "b"}, {"a", "c", "b"}));
  CHECK(word_embed({}, {}));
  CHECK_FALSE(word_embed({"a"}, {}));
}

TEST_CASE("word embedding into a prefix") {
  // the target may extend past the matched blocks
  CHECK(word_embed_prefix({"c"}, {"c", "c", "a"}));
  CHECK(word_embed_prefix({"a"}, {"a", "a"}));  // word_embed rejects this one
  CHECK_FALSE(word_embed({"a"}, {"a", "a"}));
  CHECK(word_embed_prefix({"b", "a"}, {"b", "a", "a", "a"}));
  CHECK(word_embed_prefix({}, {"a", "b"}));

  // but each block still has to start at the front and stay odd
  CHECK_FALSE(word_embed_prefix({"b"}, {"a", "b"}));
  CHECK_FALSE(word_embed_prefix({"a", "b"}, {"a", "a", "b"}));
  CHECK_FALSE(word_embed_prefix({"a"}, {}));
}

TEST_CASE("type properties on random instances") {
  std::mt19937 rng(20240817);
  std::vector<std::string> alphabet = {"a", "b", "c"};
  std::uniform_int_distribution<int> size_dist(1, 9);

  for (int i = 0; i < 400; ++i) {
    Type t = testgen::random_type(rng, size_dist(rng), alphabet);

    // print/parse round-trip is exact
    CHECK(parse_type(to_string(t)) == t);

    // canonicalize is idempotent and preserves head, rank, size
    Type c = canonicalize(t);
    CHECK(canonicalize(c) == c);
    CHECK(c.head() == t.head());
    CHECK(c.rank() == t.rank());
    CHECK(c.atom_count() == t.atom_count());

    // tree depth equals rank; leaf count equals... every path ends in a leaf
    CHECK(tree(t).depth() == t.rank());

    // parts under the one-letter head path are exactly the spine arguments
    auto parts = parts_under(t, {t.head()});
    CHECK(parts == t.spine_args());

    // shuffling argument lists at every level preserves the iso class
    Type s = testgen::shuffle_args(rng, t);
    CHECK(iso(t, s));
    CHECK(canonicalize(s) == c);

    // delayed arguments all appear among parts under odd head-paths
    for (const auto& [part, k] : delayed_arguments(t)) {
      CHECK(k % 2 == 1);
      PathWord w(static_cast<std::size_t>(k), t.head());
      auto at = parts_under(t, w);
      CHECK(std::find(at.begin(), at.end(), part) != at.end());
    }
  }
}

TEST_CASE("word embedding properties on random instances") {
  std::mt19937 rng(977);
  std::uniform_int_distribution<int> len_dist(0, 6);
  std::uniform_int_distribution<int> letter_dist(0, 1);
  std::uniform_int_distribution<int> steps_dist(0, 3);

  auto random_word = [&](int len) {
    PathWord w;
    for (int i = 0; i < len; ++i) w.push_back(letter_dist(rng) ? "a" : "b");
    return w;
  };

  for (int i = 0; i < 300; ++i) {
    PathWord w = random_word(len_dist(rng));
    CHECK(word_embed(w, w));  // reflexive

    // expand by tripling random occurrences; must embed, parity holds
    PathWord v = w;
    int steps = steps_dist(rng);
    for (int s = 0; s < steps && !v.empty(); ++s) {
      std::uniform_int_distribution<std::size_t> at(0, v.size() - 1);
      std::size_t j = at(rng);
      v.insert(v.begin() + j, 2, v[j]);
    }
    CHECK(word_embed(w, v));
    CHECK((v.size() - w.size()) % 2 == 0);

    // unrelated longer word of wrong parity never embeds
    PathWord odd = v;
    odd.push_back("a");
    CHECK_FALSE(word_embed(w, odd));

    // prefix embedding is the weaker relation, and ignores extra tail
    CHECK(word_embed_prefix(w, v));
    CHECK(word_embed_prefix(w, odd));
    PathWord longer = v;
    for (int s = 0; s < 3; ++s) longer.push_back(letter_dist(rng) ? "a" : "b");
    CHECK(word_embed_prefix(w, longer));
  }

  // transitivity probe: w embeds in v, v embeds in u => w embeds in u
  for (int i = 0; i < 100; ++i) {
    PathWord w = random_word(len_dist(rng) + 1);
    PathWord v = w;
    for (int s = 0; s < 2; ++s) {
      std::uniform_int_distribution<std::size_t> at(0, v.size() - 1);
      std::size_t j = at(rng);
      v.insert(v.begin() + j, 2, v[j]);
    }
    PathWord u = v;
    std::uniform_int_distribution<std::size_t> at(0, u.size() - 1);
    std::size_t j = at(rng);
    u.insert(u.begin() + j, 2, u[j]);
    CHECK(word_embed(w, v));
    CHECK(word_embed(v, u));
    CHECK(word_embed(w, u));
  }
}
