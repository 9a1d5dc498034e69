#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "strw/term.hpp"

using namespace strw;

TEST_CASE("parsing basics") {
    TermPtr id = parse_term("\\x. x");
    CHECK(id->kind == Term::Kind::Abs);
    CHECK(id->left->kind == Term::Kind::Var);
    CHECK(print_term(id) == "\\x.x");

    TermPtr n6 = parse_term("\\s0 s1 x. s1 (s1 (s0 x))");
    CHECK(n6->kind == Term::Kind::Abs);
    CHECK(term_size(n6) == 10);

    TermPtr omega = parse_term("(\\x. x x) (\\x. x x)");
    CHECK(omega->kind == Term::Kind::App);
    CHECK(omega->left->kind == Term::Kind::Abs);
    CHECK(alpha_eq(omega->left, omega->right));
}

TEST_CASE("parser rejects reserved names and bad syntax") {
    CHECK_THROWS_AS(parse_term("_g0"), ParseError);
    CHECK_THROWS_AS(parse_term("\\_g1. _g1"), ParseError);
    CHECK_THROWS_AS(parse_term("(x"), ParseError);
    CHECK_THROWS_AS(parse_term(""), ParseError);
    CHECK_THROWS_AS(parse_term("x )"), ParseError);
    CHECK(parse_term_internal("_g0 _g1") != nullptr);
}

TEST_CASE("comments and application associativity") {
    TermPtr t = parse_term("x y z -- trailing words\n");
    // (x y) z
    CHECK(t->kind == Term::Kind::App);
    CHECK(t->left->kind == Term::Kind::App);
    TermPtr u = parse_term("-- leading\n \\x y. x -- end\n");
    CHECK(alpha_eq(u, parse_term("\\a b. a")));
}

TEST_CASE("printer fixpoint") {
    for (const char* src :
         {"\\x. x", "(\\x. x x) (\\x. x x)", "\\s0 s1 x. s1 (s1 (s0 x))",
          "x (\\y. y x) z", "\\f. f (\\x. f x x)"}) {
        std::string once = print_term(parse_term(src));
        CHECK(print_term(parse_term(once)) == once);
    }
}

TEST_CASE("size per the inductive clauses") {
    CHECK(term_size(parse_term("x")) == 1);
    CHECK(term_size(parse_term("\\x. x")) == 2);
    CHECK(term_size(parse_term("(\\x. x) y")) == 4);
}

TEST_CASE("free variables") {
    CHECK(free_vars(parse_term("\\x. x")).empty());
    CHECK(free_vars(parse_term("x y")) == std::set<std::string>{"x", "y"});
    CHECK(free_vars(parse_term("\\x. x y")) == std::set<std::string>{"y"});
}

TEST_CASE("substitution") {
    TermPtr t = substitute(parse_term("x y"), {{"x", mk_var("z")}});
    CHECK(alpha_eq(t, parse_term("z y")));

    // capture avoidance: (\y. x)[y/x] must rename the binder
    TermPtr u = substitute(parse_term("\\y. x"), {{"x", mk_var("y")}});
    CHECK(u->kind == Term::Kind::Abs);
    CHECK(u->name != "y");
    CHECK(u->left->kind == Term::Kind::Var);
    CHECK(u->left->name == "y");

    // (x x)[N/x] duplicates N
    TermPtr n = parse_term("\\w. w");
    TermPtr v = substitute(parse_term("x x"), {{"x", n}});
    CHECK(alpha_eq(v, parse_term("(\\w. w) (\\w. w)")));

    // simultaneous, not sequential
    TermPtr s = substitute(parse_term("x y"), {{"x", mk_var("y")}, {"y", mk_var("x")}});
    CHECK(alpha_eq(s, parse_term("y x")));

    CHECK(alpha_eq(substitute(parse_term("\\x. x y"), {}), parse_term("\\x. x y")));
    CHECK_THROWS(substitute(parse_term("x"), {{"x", mk_var("a")}, {"x", mk_var("b")}}));
}

TEST_CASE("alpha equivalence") {
    CHECK(alpha_eq(parse_term("\\x. x"), parse_term("\\y. y")));
    CHECK_FALSE(alpha_eq(parse_term("\\x y. x"), parse_term("\\x y. y")));
    CHECK(alpha_eq(parse_term("\\x. x z"), parse_term("\\y. y z")));
    CHECK_FALSE(alpha_eq(parse_term("\\x. x z"), parse_term("\\y. y w")));
    CHECK(alpha_key(parse_term("\\a b. b a")) == alpha_key(parse_term("\\u v. v u")));
}

TEST_CASE("beta steps") {
    CHECK(alpha_eq(beta_step(parse_term("(\\x. x) y"), {}), parse_term("y")));
    CHECK(alpha_eq(beta_step(parse_term("\\z. (\\x. x) z"), {Step::Body}),
                   parse_term("\\z. z")));
    TermPtr omega = parse_term("(\\x. x x) (\\x. x x)");
    CHECK(alpha_eq(beta_step(omega, {}), omega));
    CHECK_THROWS_AS(beta_step(parse_term("x y"), {}), NotARedex);
    CHECK_THROWS_AS(beta_step(parse_term("\\x. x"), {Step::Fun}), NotARedex);
}

TEST_CASE("redex positions cover nested redexes") {
    TermPtr t = parse_term("(\\x. x) ((\\y. y) z)");
    auto rs = redex_positions(t);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].empty());
    CHECK(rs[1] == RedexPosition{Step::Arg});
    for (const auto& pos : rs) {
        TermPtr after = beta_step(t, pos);
        CHECK(term_size(after) >= 1);
        auto fv_after = free_vars(after);
        for (const auto& v : fv_after) CHECK(free_vars(t).count(v));
    }
}

TEST_CASE("reduce_to_nf") {
    auto r = reduce_to_nf(parse_term("(\\x. x) y"), 10);
    CHECK_FALSE(r.fuel_exhausted);
    CHECK(r.steps == 1);
    CHECK(alpha_eq(r.term, parse_term("y")));

    auto o = reduce_to_nf(parse_term("(\\x. x x) (\\x. x x)"), 100);
    CHECK(o.fuel_exhausted);
    CHECK(o.steps == 100);

    auto k = reduce_to_nf(parse_term("(\\x y. x) a ((\\x. x x) (\\x. x x))"), 50);
    CHECK_FALSE(k.fuel_exhausted);  // leftmost-outermost discards the bomb
    CHECK(alpha_eq(k.term, parse_term("a")));
}

TEST_CASE("is_sn verdicts") {
    CHECK(is_sn(parse_term("\\x. x"), 1000) == SnVerdict::Yes);
    CHECK(is_sn(parse_term("(\\x. x x) (\\x. x x)"), 1000) == SnVerdict::No);
    // the divergent reduct hides in argument position
    CHECK(is_sn(parse_term("(\\x. y) ((\\x. x x) (\\x. x x))"), 1000) == SnVerdict::No);
    // grows forever and never revisits itself whole, but every reduct
    // carries a copy of an earlier term, which witnesses divergence
    CHECK(is_sn(parse_term("(\\x. x x x) (\\x. x x x)"), 200) == SnVerdict::No);
    CHECK(is_sn(parse_term("(\\x. x x) (\\x. \\y. x x)"), 200) == SnVerdict::No);
    // a genuinely undecided case under starvation fuel
    CHECK(is_sn(parse_term("(\\x. x x) (\\y. \\z. z y y)"), 2) == SnVerdict::Unknown);
    // duplication that still terminates
    CHECK(is_sn(parse_term("(\\x. x x) (\\y. \\z. z y y)"), 100000) == SnVerdict::Yes);
}

TEST_CASE("is_sn agrees with reduce_to_nf on Yes") {
    for (const char* src : {"(\\x. x) ((\\y. y) z)", "\\f. (\\x. f x) w",
                            "(\\x y. y x) a (\\u. u)"}) {
        TermPtr t = parse_term(src);
        REQUIRE(is_sn(t, 100000) == SnVerdict::Yes);
        CHECK_FALSE(reduce_to_nf(t, 100000).fuel_exhausted);
    }
}

TEST_CASE("closed term enumeration") {
    auto upto2 = enumerate_closed_terms(2);
    REQUIRE(upto2.size() == 1);
    CHECK(alpha_eq(upto2[0], parse_term("\\x. x")));

    auto upto3 = enumerate_closed_terms(3);
    REQUIRE(upto3.size() == 3);
    CHECK(alpha_eq(upto3[0], parse_term("\\x. x")));
    bool saw_k = false, saw_k2 = false;
    for (const auto& t : upto3) {
        saw_k |= alpha_eq(t, parse_term("\\x. \\y. x"));
        saw_k2 |= alpha_eq(t, parse_term("\\x. \\y. y"));
    }
    CHECK(saw_k);
    CHECK(saw_k2);

    auto upto6 = enumerate_closed_terms(6);
    std::set<std::string> keys;
    for (const auto& t : upto6) {
        CHECK(free_vars(t).empty());
        CHECK(term_size(t) <= 6);
        CHECK(keys.insert(alpha_key(t)).second);  // duplicate-free
    }
    // determinism
    auto again = enumerate_closed_terms(6);
    REQUIRE(again.size() == upto6.size());
    for (size_t i = 0; i < again.size(); ++i)
        CHECK(alpha_eq(again[i], upto6[i]));
}

TEST_CASE("fresh names stay out of the way") {
    std::string a = fresh_name();
    std::string b = fresh_name();
    CHECK(a != b);
    CHECK(is_reserved_name(a));
    reserve_fresh_names_above(999999);
    CHECK(fresh_name() == "_g1000000");
}
