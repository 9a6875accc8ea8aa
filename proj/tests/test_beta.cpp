#include <random>

#include "catch_amalgamated.hpp"
#include "helpers.hpp"
#include "retracts/affine.hpp"
#include "retracts/beta.hpp"

using namespace retracts;

TEST_CASE("beta retraction strips arguments syntactically") {
  SECTION("full strip") {
    auto s = beta_retract(parse_type("c"), parse_type("a->b->c"));
    REQUIRE(s.has_value());
    REQUIRE(s->size() == 2);
    CHECK((*s)[0] == parse_type("a"));
    CHECK((*s)[1] == parse_type("b"));
  }

  SECTION("identical types strip nothing") {
    auto s = beta_retract(parse_type("(a->b)->c"), parse_type("(a->b)->c"));
    REQUIRE(s.has_value());
    CHECK(s->empty());
  }

  SECTION("argument swap is not a beta retraction") {
    CHECK_FALSE(beta_retract(parse_type("a->b->c"), parse_type("b->a->c")).has_value());
  }

  SECTION("suffix must match exactly") {
    CHECK(beta_retract(parse_type("b->c"), parse_type("b->b->c")).has_value());
    CHECK_FALSE(beta_retract(parse_type("a"), parse_type("b")).has_value());
    CHECK_FALSE(beta_retract(parse_type("a->a"), parse_type("a")).has_value());
  }
}

TEST_CASE("inhabitation search") {
  SECTION("identity") {
    auto w = inhabited(parse_type("a->a"));
    REQUIRE(w.has_value());
    CHECK(alpha_equal(*w, parse_term("\\x:a. x")));
  }

  SECTION("bare atom has no closed inhabitant") {
    CHECK_FALSE(inhabited(parse_type("a")).has_value());
  }

  SECTION("Peirce's law is not provable") {
    CHECK_FALSE(inhabited(parse_type("((a->b)->a)->a")).has_value());
  }

  SECTION("double negation of an atom is not provable") {
    CHECK_FALSE(inhabited(parse_type("(a->a)->a")).has_value());
    CHECK_FALSE(inhabited(parse_type("((a->b)->b)->a")).has_value());
  }

  SECTION("argument swap under a hypothesis") {
    auto w = inhabited(parse_type("b->a->c"), {{"x", parse_type("a->b->c")}});
    REQUIRE(w.has_value());
    CHECK(alpha_equal(*w, parse_term("\\u:b. \\v:a. x v u")));
  }

  SECTION("composition") {
    auto w = inhabited(parse_type("(a->b)->(b->c)->a->c"));
    REQUIRE(w.has_value());
    CHECK(alpha_equal(*w, parse_term("\\f:a->b. \\g:b->c. \\x:a. g (f x)")));
  }

  SECTION("dropped argument") {
    auto w = inhabited(parse_type("a->b->a"));
    REQUIRE(w.has_value());
    TypeEnv env;
    CHECK(typecheck(env, *w) == parse_type("a->b->a"));
  }

  SECTION("loop-checked searches terminate on unprovable goals") {
    CHECK_FALSE(inhabited(parse_type("(((a->b)->b)->a)->a")).has_value());
    CHECK_FALSE(inhabited(parse_type("b"), {{"x", parse_type("(b->a)->b->b")}}).has_value());
  }

  SECTION("a hypothesis can feed its own argument") {
    // double negation of Peirce's law; the head hypothesis is used twice
    Type goal = parse_type("((((a->b)->a)->a)->b)->b");
    auto w = inhabited(goal);
    REQUIRE(w.has_value());
    TypeEnv env;
    CHECK(typecheck(env, *w) == goal);
  }

  SECTION("hypotheses can be reused") {
    // needs the hypothesis twice: once per argument of the pairing type
    auto w = inhabited(parse_type("(a->a->b)->b"), {{"x", parse_type("a")}});
    REQUIRE(w.has_value());
    TypeEnv env{{"x", parse_type("a")}};
    CHECK(typecheck(env, *w) == parse_type("(a->a->b)->b"));
  }
}

TEST_CASE("beta embedding") {
  SECTION("identity inhabits the stripped argument") {
    auto ws = beta_embed(parse_type("c"), parse_type("(c->c)->c"));
    REQUIRE(ws.has_value());
    REQUIRE(ws->size() == 1);
    CHECK(alpha_equal((*ws)[0], parse_term("\\z:c. z")));
  }

  SECTION("an unreachable argument blocks the embedding") {
    CHECK_FALSE(beta_embed(parse_type("a"), parse_type("b->a")).has_value());
    // ... but the retraction itself is fine, the decoder just needs help
    CHECK(beta_retract(parse_type("a"), parse_type("b->a")).has_value());
  }

  SECTION("trivial embedding") {
    auto ws = beta_embed(parse_type("a->b"), parse_type("a->b"));
    REQUIRE(ws.has_value());
    CHECK(ws->empty());
  }
}

TEST_CASE("beta witnesses verify") {
  SECTION("environment-backed retraction witness") {
    auto w = beta_witness(parse_type("c"), parse_type("a->b->c"));
    REQUIRE(w.has_value());
    REQUIRE(w->env.size() == 2);
    WitnessReport rep = verify_witness(*w);
    INFO(rep.failure);
    CHECK(rep.ok());
    CHECK(rep.affine());
  }

  SECTION("combinator embedding witness") {
    auto w = beta_embed_witness(parse_type("c"), parse_type("(c->c)->c"));
    REQUIRE(w.has_value());
    CHECK(w->env.empty());
    WitnessReport rep = verify_witness(*w);
    INFO(rep.failure);
    CHECK(rep.ok());
  }

  SECTION("no embedding witness without provable arguments") {
    CHECK_FALSE(beta_embed_witness(parse_type("a"), parse_type("b->a")).has_value());
  }
}

TEST_CASE("beta retraction properties on random types") {
  std::mt19937 rng(481516);
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::uniform_int_distribution<int> size_dist(1, 5);
  std::uniform_int_distribution<int> nargs_dist(1, 3);

  SECTION("built strips are recovered and imply the affine retraction") {
    for (int it = 0; it < 120; ++it) {
      Type rho = testgen::random_type(rng, size_dist(rng), alphabet);
      std::vector<Type> extra;
      for (int k = nargs_dist(rng); k > 0; --k)
        extra.push_back(testgen::random_type(rng, size_dist(rng), alphabet));
      Type tau = Type::arrow_chain(extra, rho);

      auto s = beta_retract(rho, tau);
      REQUIRE(s.has_value());
      REQUIRE(s->size() == extra.size());
      for (std::size_t i = 0; i < extra.size(); ++i) CHECK((*s)[i] == extra[i]);

      INFO(to_string(rho) << "  vs  " << to_string(tau));
      CHECK(decide_affine(rho, tau).has_value());

      auto w = beta_witness(rho, tau);
      REQUIRE(w.has_value());
      WitnessReport rep = verify_witness(*w);
      INFO(rep.failure);
      CHECK(rep.ok());
      CHECK(rep.affine());
    }
  }

  SECTION("two-way beta retraction forces equal types") {
    int two_way = 0;
    for (int it = 0; it < 150; ++it) {
      Type rho = testgen::random_type(rng, size_dist(rng), alphabet);
      Type tau = (it % 3 == 0) ? rho : testgen::random_type(rng, size_dist(rng) + 1, alphabet);
      bool fwd = beta_retract(rho, tau).has_value();
      bool bwd = beta_retract(tau, rho).has_value();
      if (fwd && bwd) {
        ++two_way;
        CHECK(rho == tau);
      }
    }
    CHECK(two_way > 0);
  }

  SECTION("embedding implies retraction, and witnesses are long normal") {
    for (int it = 0; it < 80; ++it) {
      Type goal = testgen::random_type(rng, size_dist(rng) + 1, alphabet);
      NamedContext ctx;
      if (it % 2 == 0) ctx.push_back({"h", testgen::random_type(rng, size_dist(rng), alphabet)});
      auto w = inhabited(goal, ctx);
      if (!w) continue;
      TypeEnv env;
      for (const auto& [n, t] : ctx) env[n] = t;
      CHECK(typecheck(env, *w) == goal);
      CHECK(alpha_equal(long_normal_form(env, *w), *w));
    }
  }

  SECTION("enlarging the context preserves provability") {
    for (int it = 0; it < 80; ++it) {
      Type goal = testgen::random_type(rng, size_dist(rng) + 1, alphabet);
      auto w = inhabited(goal);
      if (!w) continue;
      NamedContext bigger{{"h1", testgen::random_type(rng, size_dist(rng), alphabet)},
                          {"h2", testgen::random_type(rng, size_dist(rng), alphabet)}};
      CHECK(inhabited(goal, bigger).has_value());
    }
  }
}
