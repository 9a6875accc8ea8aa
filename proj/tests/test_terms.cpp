#include "retracts/terms.hpp"

#include "catch_amalgamated.hpp"
#include "helpers.hpp"

using namespace retracts;

static Type T(const std::string& s) { return parse_type(s); }
static Term M(const std::string& s) { return parse_term(s); }

TEST_CASE("term parsing and printing") {
  CHECK(to_string(M("x")) == "x");
  CHECK(to_string(M("f x y")) == "f x y");
  CHECK(M("f x y") == Term::app(Term::app(Term::var("f"), Term::var("x")), Term::var("y")));
  CHECK(M("f (x y)") != M("f x y"));
  CHECK(to_string(M("\\x:a. x")) == "\\x:a. x");
  CHECK(to_string(M("\\x:a->b.x y")) == "\\x:a->b. x y");  // body extends right
  CHECK(M("\\x:a->b. x y").body().is_app());
  CHECK(to_string(M("(\\x:a. x) y")) == "(\\x:a. x) y");
  CHECK(to_string(M("f (\\x:a. x)")) == "f (\\x:a. x)");

  CHECK_THROWS_AS(M(""), parse_error);
  CHECK_THROWS_AS(M("\\x. x"), parse_error);
  CHECK_THROWS_AS(M("\\x:a x"), parse_error);
  CHECK_THROWS_AS(M("(x"), parse_error);
  CHECK_THROWS_AS(M("x)"), parse_error);

  // round-trip is exact on printed forms
  for (const char* s : {"\\x:(a->b)->c. x (\\y:a. z)", "f (g x) (\\u:c. u)", "x"}) {
    Term t = M(s);
    CHECK(parse_term(to_string(t)) == t);
  }
}

TEST_CASE("free variables and substitution") {
  CHECK(free_vars(M("\\x:a. x y")) == std::set<std::string>{"y"});
  CHECK(free_vars(M("\\x:a. \\y:b. x")) == std::set<std::string>{});

  // capture avoidance: (\y:a. x)[x := y] must not capture y
  Term t = subst(M("\\y:a. x"), "x", Term::var("y"));
  CHECK(t.is_abs());
  CHECK(t.name() != "y");
  CHECK(alpha_equal(t, M("\\z:a. y")));

  CHECK(subst(M("\\x:a. x"), "x", Term::var("w")) == M("\\x:a. x"));  // shadowed
}

TEST_CASE("alpha equality") {
  CHECK(alpha_equal(M("\\x:a. x"), M("\\y:a. y")));
  CHECK_FALSE(alpha_equal(M("\\x:a. x"), M("\\y:b. y")));  // annotations count
  CHECK_FALSE(alpha_equal(M("\\x:a. x"), M("\\y:a. z")));
  CHECK(alpha_equal(M("\\x:a. \\y:b. x y"), M("\\u:a. \\v:b. u v")));
  CHECK_FALSE(alpha_equal(M("\\x:a. \\y:b. x"), M("\\x:a. \\y:b. y")));
}

TEST_CASE("typechecking") {
  CHECK(typecheck({}, M("\\x:a. x")) == T("a->a"));
  CHECK(typecheck({{"y", T("b")}}, M("\\x:a. y")) == T("a->b"));
  CHECK(typecheck({{"f", T("a->b")}, {"x", T("a")}}, M("f x")) == T("b"));
  CHECK_THROWS_AS(typecheck({}, M("\\x:a. x x")), type_error);
  CHECK_THROWS_AS(typecheck({}, M("x")), type_error);
  CHECK_THROWS_AS(typecheck({{"f", T("a->b")}, {"x", T("b")}}, M("f x")), type_error);
}

TEST_CASE("beta normalization") {
  CHECK(beta_normalize(M("(\\x:a. x) y")) == M("y"));
  CHECK(beta_normalize(M("(\\x:a. \\y:b. x) u v")) == M("u"));
  CHECK(alpha_equal(beta_normalize(M("(\\f:a->a. \\x:a. f (f x)) (\\y:a. y)")),
                    M("\\x:a. x")));
  // normal-order: the unused ill-behaved argument is simply dropped
  CHECK(beta_normalize(M("(\\x:a. z) ((\\y:b. y) w)")) == M("z"));
}

TEST_CASE("long normal form") {
  TypeEnv env = {{"x", T("(a->a)->a")}};
  Term l = long_normal_form(env, M("x"));
  CHECK(alpha_equal(l, M("\\s:a->a. x (\\y:a. s y)")));
  // idempotent
  CHECK(alpha_equal(long_normal_form(env, l), l));
  CHECK(typecheck(env, l) == T("(a->a)->a"));

  TypeEnv env2 = {{"f", T("a->b")}};
  CHECK(alpha_equal(long_normal_form(env2, M("f")), M("\\z:a. f z")));
  CHECK(alpha_equal(long_normal_form(env2, M("\\x:a. f x")), M("\\x:a. f x")));
}

TEST_CASE("beta-eta equality") {
  TypeEnv env = {{"f", T("a->b")}};
  CHECK(beta_eta_equal(env, M("f"), M("\\x:a. f x")));
  CHECK_FALSE(beta_eta_equal({{"f", T("a->b")}, {"g", T("a->b")}}, M("f"), M("g")));
  CHECK(beta_eta_equal(env, M("\\x:a. (\\y:a. f y) x"), M("f")));
  CHECK_THROWS_AS(beta_eta_equal({{"x", T("a")}, {"y", T("b")}}, M("x"), M("y")), type_error);

  // the cheap beta-eta normal path agrees with the long-normal one
  CHECK(beta_eta_normal(M("\\x:a. f x")) == M("f"));
  CHECK(alpha_equal(beta_eta_normal(M("(\\g:a->b. \\x:a. g x) f")), M("f")));
}

TEST_CASE("affinity") {
  CHECK(is_affine(M("\\x:a. x")));
  CHECK(is_affine(M("\\x:a. \\y:b. x")));  // dropping is fine
  CHECK_FALSE(is_affine(M("f x x")));
  CHECK_FALSE(is_affine(M("\\x:a. f x x")));
  CHECK(is_affine(M("\\x:a. (\\x:b. x) x")));  // shadowed binders are distinct
  CHECK_FALSE(is_affine(M("\\f:a->a. \\x:a. f (f x)")));
}

TEST_CASE("witness verification: identity") {
  RetractWitness w;
  w.rho = T("a");
  w.tau = T("a");
  w.coder = M("x");
  w.decoder = M("\\f:a. f");
  w.main_var = "x";
  WitnessReport r = verify_witness(w);
  CHECK(r.ok());
  CHECK(r.affine());
}

TEST_CASE("witness verification: two-argument coder and decoder") {
  // rho = b->c->a embeds into tau = ((b->a)->a)->((c->a)->a)->a
  RetractWitness w;
  w.rho = T("b->c->a");
  w.tau = T("((b->a)->a)->((c->a)->a)->a");
  w.coder = M("\\y1:(b->a)->a. \\y2:(c->a)->a. y1 (\\w:b. y2 (\\u:c. x w u))");
  w.decoder = M("\\f:((b->a)->a)->((c->a)->a)->a. \\z1:b. \\z2:c. "
                "f (\\s:b->a. s z1) (\\r:c->a. r z2)");
  w.main_var = "x";
  WitnessReport r = verify_witness(w);
  CHECK(r.ok());
  CHECK(r.affine());
}

TEST_CASE("witness verification: non-affine coder that still verifies") {
  // rho = (e->a)->c->a, tau = (e->(a->c->a)->a)->a; the coder uses its
  // bound variable y twice, so no affinity, but the round trip holds.
  RetractWitness w;
  w.rho = T("(e->a)->c->a");
  w.tau = T("(e->(a->c->a)->a)->a");
  w.env = {{"E", T("e")}};
  w.coder = M("\\y:e->(a->c->a)->a. y E (\\w1:a. \\w2:c. "
              "x (\\v:e. y v (\\w1:a. \\w2:c. w1)) w2)");
  w.decoder = M("\\f:(e->(a->c->a)->a)->a. \\z1:e->a. \\z2:c. "
                "f (\\u1:e. \\u2:a->c->a. u2 (z1 u1) z2)");
  w.main_var = "x";
  WitnessReport r = verify_witness(w);
  CHECK(r.ok());
  CHECK_FALSE(r.coder_affine);
  CHECK(r.decoder_affine);
  CHECK_FALSE(r.affine());
}

TEST_CASE("witness verification: failures are reported") {
  RetractWitness w;
  w.rho = T("a");
  w.tau = T("b->a");
  w.env = {{"E", T("b")}};
  w.coder = M("\\y:b. x");
  w.decoder = M("\\f:b->a. f E");
  w.main_var = "x";
  CHECK(verify_witness(w).ok());

  SECTION("decoder mentioning the main variable") {
    w.decoder = M("\\f:b->a. x");
    WitnessReport r = verify_witness(w);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.main_var_absent);
  }
  SECTION("wrong round trip") {
    w.env["F"] = T("a");
    w.decoder = M("\\f:b->a. F");
    WitnessReport r = verify_witness(w);
    CHECK(r.decoder_well_typed);
    CHECK_FALSE(r.round_trip);
    CHECK_FALSE(r.ok());
  }
  SECTION("ill-typed coder") {
    w.coder = M("\\y:a. x");
    WitnessReport r = verify_witness(w);
    CHECK_FALSE(r.coder_well_typed);
    CHECK_FALSE(r.ok());
  }
  SECTION("env must not shadow the main variable") {
    w.env["x"] = T("a");
    WitnessReport r = verify_witness(w);
    CHECK_FALSE(r.ok());
  }
}

TEST_CASE("kernel properties on random types") {
  std::mt19937 rng(424242);
  std::vector<std::string> alphabet = {"a", "b", "c"};
  std::uniform_int_distribution<int> size_dist(1, 8);

  for (int i = 0; i < 200; ++i) {
    Type t = testgen::random_type(rng, size_dist(rng), alphabet);
    TypeEnv env = {{"x", t}};

    // eta-expansion of a variable: long normal, idempotent, type-preserving
    Term l = long_normal_form(env, Term::var("x"));
    CHECK(typecheck(env, l) == t);
    CHECK(alpha_equal(long_normal_form(env, l), l));
    CHECK(beta_eta_equal(env, Term::var("x"), l));
    CHECK(is_affine(l));

    // the eta-expansion beta-eta-normalizes back to the bare variable
    CHECK(beta_eta_normal(l) == Term::var("x"));

    // normalization preserves typing
    CHECK(typecheck(env, beta_normalize(l)) == t);
  }
}
