#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "strw/transform.hpp"

using namespace strw;

namespace {

TypePtr T(const std::string& s) { return parse_type(s); }

bool ctx_eq(const TypeContext& a, const TypeContext& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [x, ty] : a) {
        auto it = b.find(x);
        if (it == b.end() || !type_eq(ty, it->second)) return false;
    }
    return true;
}

// |- \x. x : a -o a
DerivPtr identity_deriv() { return d_lolli(d_ax("x", T("a")), "x"); }

// |- \x. x : {d -o d} -o d -o d
DerivPtr wrapped_identity() {
    DerivPtr ax = d_ax("x1", T("d -o d"));
    return d_lolli(d_m(ax, {"x1"}, "x"), "x");
}

// |- \y. y : {d -o d} via a singleton stratification
DerivPtr strat_identity() { return d_st({d_lolli(d_ax("y", T("d")), "y")}); }

// |- (\x. x) (\y. y) : d -o d, plain typing
DerivPtr redex_plain() {
    DerivPtr fun = d_lolli(d_ax("x", T("d -o d")), "x");
    DerivPtr arg = d_lolli(d_ax("y", T("d")), "y");
    return d_lolle(fun, arg);
}

// same subject, argument used at stratified type
DerivPtr redex_stratified() {
    return d_lolle(wrapped_identity(), strat_identity());
}

}  // namespace

TEST_CASE("type variable substitution through a derivation") {
    DerivPtr d = subst_tyvar_deriv(identity_deriv(), "a", T("b -o b"));
    CHECK_FALSE(check(d));
    CHECK(type_eq(d->conclusion.type, T("(b -o b) -o b -o b")));
    CHECK(alpha_eq(d->conclusion.subject, parse_term("\\x. x")));

    // substituting an absent variable leaves the judgment alone
    DerivPtr e = subst_tyvar_deriv(identity_deriv(), "zz", T("b"));
    CHECK(type_eq(e->conclusion.type, T("a -o a")));

    // bound variables shadow
    DerivPtr gen = d_foralli(identity_deriv(), "a");
    DerivPtr f = subst_tyvar_deriv(gen, "a", T("b"));
    CHECK(type_eq(f->conclusion.type, T("forall a. a -o a")));

    // capture forces a binder rename
    DerivPtr gen_b = d_foralli(identity_deriv(), "b");  // forall b. a -o a
    DerivPtr g = subst_tyvar_deriv(gen_b, "a", T("b"));
    CHECK_FALSE(check(g));
    CHECK(type_eq(g->conclusion.type, T("forall c. b -o b")));
    CHECK_FALSE(type_eq(g->conclusion.type, T("forall c. c -o c")));

    CHECK_THROWS_AS(subst_tyvar_deriv(identity_deriv(), "a", T("{b}")), DerivError);
}

TEST_CASE("substitution, axiom and weakening cases") {
    reset_subst_stats();

    // replacing the variable of an axiom gives back the replacement
    DerivPtr pi = d_ax("x", T("a -o a"));
    DerivPtr s = subst_derivation({identity_deriv()}, pi, {"x"});
    CHECK_FALSE(check(s));
    CHECK(s->conclusion.ctx.empty());
    CHECK(alpha_eq(s->conclusion.subject, parse_term("\\x. x")));
    CHECK(type_eq(s->conclusion.type, T("a -o a")));

    // a weakened variable drops the term but keeps the context
    DerivPtr pw = d_w(d_ax("x", T("a")), "u", T("b"));
    DerivPtr sw = subst_derivation({d_ax("z", T("b"))}, pw, {"u"});
    CHECK_FALSE(check(sw));
    CHECK(ctx_eq(sw->conclusion.ctx, {{"x", T("a")}, {"z", T("b")}}));
    CHECK(alpha_eq(sw->conclusion.subject, parse_term("x")));

    CHECK(subst_stats().calls == 2);
    CHECK(subst_stats().violations == 0);

    CHECK_THROWS_AS(subst_derivation({identity_deriv()}, pi, {"missing"}),
                    DerivError);
    CHECK_THROWS_AS(subst_derivation({d_ax("z", T("b"))}, pi, {"x"}), DerivError);
}

TEST_CASE("substitution through a multiplexor") {
    reset_subst_stats();

    // x : {a1 -o a2, a1} |- x x : a2
    DerivPtr app = d_lolle(d_ax("x1", T("a1 -o a2")), d_ax("x2", T("a1")));
    DerivPtr pi = d_m(app, {"x1", "x2"}, "x");
    DerivPtr sigma = var_typing("v", T("{a1 -o a2, a1}"));
    DerivPtr s = subst_derivation({sigma}, pi, {"x"});
    CHECK_FALSE(check(s));
    CHECK(alpha_eq(s->conclusion.subject, parse_term("v v")));
    CHECK(ctx_eq(s->conclusion.ctx, {{"v", T("{a1 -o a2, a1}")}}));
    CHECK(type_eq(s->conclusion.type, T("a2")));

    // two occurrences at the same type share one stratification premise
    DerivPtr f = d_ax("f", T("a -o a -o b"));
    DerivPtr app2 = d_lolle(d_lolle(f, d_ax("x1", T("a"))), d_ax("x2", T("a")));
    DerivPtr pi2 = d_m(app2, {"x1", "x2"}, "x");
    DerivPtr s2 = subst_derivation({var_typing("v", T("{a}"))}, pi2, {"x"});
    CHECK_FALSE(check(s2));
    CHECK(alpha_eq(s2->conclusion.subject, parse_term("f v v")));
    CHECK(type_eq(s2->conclusion.ctx.at("v"), T("{a}")));

    // a replacement with a duplicated stratification premise gets padded in
    DerivPtr dup = d_st({d_ax("v", T("a")), d_ax("v", T("a"))});
    DerivPtr pi3 = d_m(d_ax("x1", T("a")), {"x1"}, "x");
    DerivPtr s3 = subst_derivation({dup}, pi3, {"x"});
    CHECK_FALSE(check(s3));
    CHECK(alpha_eq(s3->conclusion.subject, parse_term("v")));
    CHECK(ctx_eq(s3->conclusion.ctx, {{"v", T("{a}")}}));
    CHECK(type_eq(s3->conclusion.type, T("a")));

    CHECK(subst_stats().violations == 0);
}

TEST_CASE("substitution through a stratification") {
    // x : {a} |- x : {a} substituted with a variable typing of v
    DerivPtr pi = d_st({d_ax("x", T("a"))});
    DerivPtr s = subst_derivation({var_typing("v", T("{a}"))}, pi, {"x"});
    CHECK_FALSE(check(s));
    CHECK(alpha_eq(s->conclusion.subject, parse_term("v")));
    CHECK(type_eq(s->conclusion.type, T("{a}")));
    CHECK(ctx_eq(s->conclusion.ctx, {{"v", T("{a}")}}));

    // two stratification premises using the variable at different types
    DerivPtr p1 = d_ax("x", T("a"));
    DerivPtr p2 = d_st({d_ax("x", T("a"))});  // x : {a} |- x : {a}
    DerivPtr pi2 = d_st({p1, p2});            // x : {a, {a}} |- x : {a, {a}}
    DerivPtr s2 = subst_derivation({var_typing("v", T("{a, {a}}"))}, pi2, {"x"});
    CHECK_FALSE(check(s2));
    CHECK(type_eq(s2->conclusion.type, T("{a, {a}}")));
    CHECK(ctx_eq(s2->conclusion.ctx, {{"v", T("{a, {a}}")}}));
}

TEST_CASE("the substitution weight bound holds on worked examples") {
    reset_subst_stats();
    // body of the redexes below, substituted by hand
    DerivPtr body = d_ax("x", T("d -o d"));
    DerivPtr arg = d_lolli(d_ax("y", T("d")), "y");
    DerivPtr s = subst_derivation({arg}, body, {"x"});
    CHECK(weight_at(s, 1) == 2);

    DerivPtr m_body = d_m(d_ax("x1", T("d -o d")), {"x1"}, "x");
    DerivPtr s2 = subst_derivation({d_st({arg})}, m_body, {"x"});
    CHECK_FALSE(check(s2));
    CHECK(weight_at(s2, 1) == 2);
    CHECK(weight_at(s2, 2) == 2);  // the used component replaces the axiom

    CHECK(subst_stats().calls == 2);
    CHECK(subst_stats().violations == 0);
}

TEST_CASE("subject reduction on a plain redex") {
    reset_reduce_stats();
    DerivPtr d = redex_plain();
    CHECK(weight_at(d, 1) == 5);
    auto [r, rep] = subject_reduce(d, {});
    CHECK_FALSE(check(r));
    CHECK(alpha_eq(r->conclusion.subject, parse_term("\\y. y")));
    CHECK(type_eq(r->conclusion.type, d->conclusion.type));
    CHECK(ctx_eq(r->conclusion.ctx, d->conclusion.ctx));
    CHECK(weight_at(r, 1) == 2);
    CHECK(rep.loll_detours_removed == 1);
    CHECK(rep.forall_detours_removed == 0);
    CHECK(reduce_stats().steps == 1);
    CHECK(reduce_stats().weight_violations == 0);
}

TEST_CASE("subject reduction with a stratified argument") {
    DerivPtr d = redex_stratified();
    long rk = rank_of(d);
    BigInt before = weight_at(d, static_cast<unsigned long>(rk));
    auto [r, rep] = subject_reduce(d, {});
    CHECK_FALSE(check(r));
    CHECK(alpha_eq(r->conclusion.subject, parse_term("\\y. y")));
    CHECK(type_eq(r->conclusion.type, d->conclusion.type));
    CHECK(weight_at(r, static_cast<unsigned long>(rk)) < before);
    CHECK(rep.loll_detours_removed == 1);
}

TEST_CASE("subject reduction under a stratification node") {
    DerivPtr d = d_st({redex_plain()});
    auto [r, rep] = subject_reduce(d, {});
    CHECK_FALSE(check(r));
    CHECK(alpha_eq(r->conclusion.subject, parse_term("\\y. y")));
    CHECK(type_eq(r->conclusion.type, T("{d -o d}")));
    CHECK(rep.loll_detours_removed == 1);
}

TEST_CASE("subject reduction at an inner position") {
    // \z. (\x. x) z  with z : d -o d
    DerivPtr inner = d_lolle(d_lolli(d_ax("x", T("d -o d")), "x"),
                             d_ax("z", T("d -o d")));
    DerivPtr d = d_lolli(inner, "z");
    auto [r, rep] = subject_reduce(d, {Step::Body});
    CHECK_FALSE(check(r));
    CHECK(alpha_eq(r->conclusion.subject, parse_term("\\z. z")));
    CHECK(type_eq(r->conclusion.type, d->conclusion.type));
    CHECK(rep.loll_detours_removed == 1);

    CHECK_THROWS_AS(subject_reduce(d, {}), NotARedex);
    CHECK_THROWS_AS(subject_reduce(d, {Step::Fun}), NotARedex);
}

TEST_CASE("quantifier detours are removed during reduction") {
    // ((\x. x) instantiated through forall) applied to \y. y
    DerivPtr gen = d_foralli(identity_deriv(), "a");
    DerivPtr inst = d_foralle(gen, T("d -o d"));
    DerivPtr arg = d_lolli(d_ax("y", T("d")), "y");
    DerivPtr d = d_lolle(inst, arg);
    CHECK_FALSE(check(d));
    auto [r, rep] = subject_reduce(d, {});
    CHECK_FALSE(check(r));
    CHECK(alpha_eq(r->conclusion.subject, parse_term("\\y. y")));
    CHECK(type_eq(r->conclusion.type, T("d -o d")));
    CHECK(rep.forall_detours_removed == 1);
    CHECK(rep.loll_detours_removed == 1);
}

TEST_CASE("eliminate_forall_detour") {
    DerivPtr gen = d_foralli(identity_deriv(), "a");
    DerivPtr inst = d_foralle(gen, T("d -o d"));
    DerivPtr r = eliminate_forall_detour(inst, {});
    CHECK_FALSE(check(r));
    CHECK(type_eq(r->conclusion.type, T("(d -o d) -o d -o d")));
    CHECK(alpha_eq(r->conclusion.subject, parse_term("\\x. x")));
    CHECK(weight_at(r, 3) == weight_at(inst, 3));

    // through an ancestor, whose stored conclusion stays valid
    DerivPtr above = d_w(inst, "u", T("c"));
    DerivPtr r2 = eliminate_forall_detour(above, {0});
    CHECK_FALSE(check(r2));
    CHECK(type_eq(r2->conclusion.type, above->conclusion.type));
    CHECK(ctx_eq(r2->conclusion.ctx, above->conclusion.ctx));

    CHECK_THROWS_AS(eliminate_forall_detour(gen, {}), DerivError);
    CHECK_THROWS_AS(eliminate_forall_detour(inst, {0, 0, 0, 0}), DerivError);
}

TEST_CASE("reorder_renaming_quantifier") {
    DerivPtr base = identity_deriv();
    DerivPtr d = d_foralli(d_w(base, "u", T("c")), "a");
    DerivPtr r = reorder_renaming_quantifier(d, 2);
    CHECK_FALSE(check(r));
    CHECK(r->rule == Rule::W);
    CHECK(r->premises[0]->rule == Rule::ForallI);
    CHECK(ctx_eq(r->conclusion.ctx, d->conclusion.ctx));
    CHECK(type_eq(r->conclusion.type, d->conclusion.type));
    CHECK(alpha_eq(r->conclusion.subject, d->conclusion.subject));

    // a longer mixed chain keeps the judgment too
    DerivPtr d2 = d_w(d_foralle(d_foralli(d_w(base, "u", T("c")), "a"), T("e")),
                      "v", T("c"));
    DerivPtr r2 = reorder_renaming_quantifier(d2, 4);
    CHECK_FALSE(check(r2));
    CHECK(ctx_eq(r2->conclusion.ctx, d2->conclusion.ctx));
    CHECK(type_eq(r2->conclusion.type, d2->conclusion.type));
    CHECK(r2->rule == Rule::W);
    CHECK(r2->premises[0]->rule == Rule::W);

    CHECK_THROWS_AS(reorder_renaming_quantifier(redex_plain(), 1), DerivError);
}

TEST_CASE("normalize_typed") {
    // (\x. x) ((\y. y) (\z. z))
    DerivPtr fun = d_lolli(d_ax("x", T("d -o d")), "x");
    DerivPtr inner = redex_plain();
    DerivPtr d = d_lolle(fun, inner);

    NormalizeResult res = normalize_typed(d, PickStrategy::LeftmostOutermost, {1, 2});
    CHECK(res.steps == 2);
    CHECK(is_normal_form(res.deriv->conclusion.subject));
    CHECK(alpha_eq(res.deriv->conclusion.subject, parse_term("\\y. y")));
    CHECK(type_eq(res.deriv->conclusion.type, T("d -o d")));
    REQUIRE(res.trace.size() == 3);
    for (size_t i = 1; i < res.trace.size(); ++i) {
        CHECK(res.trace[i].weights[0] < res.trace[i - 1].weights[0]);
        CHECK(res.trace[i].weights[1] < res.trace[i - 1].weights[1]);
    }
    CHECK(res.trace[0].subject_size == 8);
    CHECK(res.trace[2].subject_size == 2);

    // random order reaches the same normal form
    NormalizeResult rnd = normalize_typed(d, PickStrategy::Random, {}, 42);
    CHECK(rnd.steps == 2);
    CHECK(alpha_eq(rnd.deriv->conclusion.subject, parse_term("\\y. y")));

    // already normal: no steps
    NormalizeResult nf = normalize_typed(identity_deriv());
    CHECK(nf.steps == 0);
    CHECK(alpha_eq(nf.deriv->conclusion.subject, parse_term("\\x. x")));
}
