#include "strw/numerals.hpp"

#include <climits>

namespace strw {

// ------------------------------------------------------------------ words

TermPtr encode_num(unsigned long n) {
    std::vector<int> digits;  // least significant first
    for (unsigned long v = n; v > 0; v >>= 1) digits.push_back(v & 1);
    TermPtr t = mk_var("x");
    for (int bit : digits) t = mk_app(mk_var(bit ? "s1" : "s0"), t);
    return mk_abs("s0", mk_abs("s1", mk_abs("x", t)));
}

unsigned long decode_num(const TermPtr& m) {
    if (m->kind != Term::Kind::Abs || m->left->kind != Term::Kind::Abs ||
        m->left->left->kind != Term::Kind::Abs)
        throw NotANumeral("missing the three binders");
    const std::string& s0 = m->name;
    const std::string& s1 = m->left->name;
    const std::string& x = m->left->left->name;
    unsigned long n = 0;
    TermPtr cur = m->left->left->left;
    while (cur->kind == Term::Kind::App) {
        if (cur->left->kind != Term::Kind::Var)
            throw NotANumeral("digit position is not a variable");
        int bit;
        if (cur->left->name == s0)
            bit = 0;
        else if (cur->left->name == s1)
            bit = 1;
        else
            throw NotANumeral("unknown digit variable");
        if (n > (ULONG_MAX >> 1)) throw NotANumeral("numeral too large");
        n = (n << 1) | bit;
        cur = cur->right;
    }
    if (cur->kind != Term::Kind::Var || cur->name != x)
        throw NotANumeral("word does not end in the base variable");
    return n;
}

TypePtr word_type(int h, int k) {
    TypePtr a = mk_tyvar("a");
    TypePtr step = mk_arrow(a, a);
    return mk_forall(
        "a", mk_arrow(stratify_n(step, h),
                      mk_arrow(stratify_n(step, k), mk_arrow(a, a))));
}

// ------------------------------------------------------------- derivations

namespace {

// Lifts the context entry for var by extra singleton-set layers.
DerivPtr wrap_up(DerivPtr d, const std::string& var, int levels) {
    for (int i = 0; i < levels; ++i) d = d_m(d, {var}, var);
    return d;
}

// Contracts the digit occurrences into var at {a -o a}^levels, or weakens
// when the digit does not appear.
DerivPtr close_digit(DerivPtr d, const std::vector<std::string>& occs,
                     const std::string& var, int levels, const TypePtr& step) {
    if (occs.empty()) return wrap_up(d_w(d, var, step), var, levels);
    return wrap_up(d_m(d, occs, var), var, levels - 1);
}

}  // namespace

NumeralTyping numeral_derivation(unsigned long n, int h, int k) {
    if (h < 1 || k < 1)
        throw DerivError("numeral_derivation: parameters must be >= 1");
    TypePtr a = mk_tyvar("a");
    TypePtr step = mk_arrow(a, a);
    std::vector<int> digits;
    for (unsigned long v = n; v > 0; v >>= 1) digits.push_back(v & 1);
    DerivPtr d = d_ax("x", a);
    std::vector<std::string> occ0, occ1;
    for (int bit : digits) {
        std::string s = fresh_name();
        (bit ? occ1 : occ0).push_back(s);
        d = d_lolle(d_ax(s, step), d);
    }
    d = close_digit(d, occ0, "s0", h, step);
    d = close_digit(d, occ1, "s1", k, step);
    d = d_lolli(d_lolli(d_lolli(d, "x"), "s1"), "s0");
    return {n, h, k, d_foralli(d, "a")};
}

SuccTyping succ_typing(int digit, int m, int n) {
    if (digit != 0 && digit != 1)
        throw DerivError("succ_typing: digit must be 0 or 1");
    if (m < 1 || n < 1)
        throw DerivError("succ_typing: parameters must be >= 1");
    TypePtr a = mk_tyvar("a");
    TypePtr step = mk_arrow(a, a);
    const std::string f = digit == 0 ? "f0" : "f1";  // the doubled variable
    const std::string g = digit == 0 ? "f1" : "f0";
    int fl = digit == 0 ? m : n;  // set depth of f in the word type
    int gl = digit == 0 ? n : m;

    DerivPtr w = d_foralle(d_ax("w", word_type(m, n)), a);
    std::string spine_f = fresh_name();
    std::string inner_f = fresh_name();
    DerivPtr farg = d_ax(spine_f, step);
    for (int i = 0; i < fl; ++i) farg = d_st({farg});
    DerivPtr garg = d_ax(g, step);
    for (int i = 0; i < gl; ++i) garg = d_st({garg});
    DerivPtr last = d_lolle(d_ax(inner_f, step), d_ax("x", a));
    DerivPtr body = digit == 0
                        ? d_lolle(d_lolle(d_lolle(w, farg), garg), last)
                        : d_lolle(d_lolle(d_lolle(w, garg), farg), last);
    DerivPtr d = wrap_up(body, inner_f, fl);
    d = d_m(d, {spine_f, inner_f}, f);
    d = d_lolli(d_lolli(d_lolli(d, "x"), "f1"), "f0");
    d = d_lolli(d_foralli(d, "a"), "w");
    return {d->conclusion.subject, d};
}

TermPtr iter_term(int k) {
    TermPtr t = mk_var("x");
    for (int i = 0; i < k; ++i) t = mk_app(mk_var("f"), t);
    return mk_abs("f", mk_abs("x", t));
}

namespace {

// The i-th successor type (1-based from the innermost application).
TypePtr succ_step_type(int i, int digit, int m, int n) {
    return digit == 0
               ? mk_arrow(word_type(m + i - 1, n), word_type(m + i, n))
               : mk_arrow(word_type(m, n + i - 1), word_type(m, n + i));
}

}  // namespace

DerivPtr iter_typing(int k, int digit, int m, int n) {
    if (k < 1) throw DerivError("iter_typing: k must be >= 1");
    DerivPtr d = d_ax("x", word_type(m, n));
    std::vector<std::string> fs;
    for (int i = 1; i <= k; ++i) {
        std::string fi = fresh_name();
        fs.push_back(fi);
        d = d_lolle(d_ax(fi, succ_step_type(i, digit, m, n)), d);
    }
    return d_lolli(d_lolli(d_m(d, fs, "f"), "x"), "f");
}

DerivPtr iter_succ_argument(int k, int digit, int m, int n) {
    std::vector<DerivPtr> comps;
    for (int i = 1; i <= k; ++i)
        comps.push_back(digit == 0 ? succ_typing(digit, m + i - 1, n).derivation
                                   : succ_typing(digit, m, n + i - 1).derivation);
    return d_st(std::move(comps));
}

// ---------------------------------------------------------------- harness

namespace {

// Recognizes word_type(h, k) up to alpha; returns {h, k}.
std::optional<std::pair<int, int>> match_word(const TypePtr& ty) {
    TypePtr c = canonicalize(ty);
    if (c->kind != StratType::Kind::Forall) return std::nullopt;
    const std::string& a = c->name;
    auto is_step = [&](const TypePtr& t) {
        return t->kind == StratType::Kind::Arrow &&
               t->arg->kind == StratType::Kind::TyVar && t->arg->name == a &&
               t->res->kind == StratType::Kind::TyVar && t->res->name == a;
    };
    auto peel = [&](TypePtr t) -> int {
        int depth = 0;
        while (t->kind == StratType::Kind::Strat && t->comps.size() == 1) {
            t = t->comps[0];
            ++depth;
        }
        return depth >= 1 && is_step(t) ? depth : -1;
    };
    TypePtr body = c->res;
    if (body->kind != StratType::Kind::Arrow) return std::nullopt;
    int h = peel(body->arg);
    body = body->res;
    if (h < 0 || body->kind != StratType::Kind::Arrow) return std::nullopt;
    int k = peel(body->arg);
    body = body->res;
    if (k < 0 || !is_step(body)) return std::nullopt;
    return std::make_pair(h, k);
}

DerivPtr numeral_argument(const TypePtr& ty, unsigned long n) {
    if (auto hk = match_word(ty))
        return numeral_derivation(n, hk->first, hk->second).derivation;
    TypePtr c = canonicalize(ty);
    if (c->kind != StratType::Kind::Strat)
        throw DerivError("bound_harness: argument type is not a word type");
    std::vector<DerivPtr> comps;
    for (const auto& comp : c->comps)
        comps.push_back(numeral_argument(comp, n));
    return d_st(std::move(comps));
}

}  // namespace

BoundReport bound_harness(const TermPtr& program,
                          const DerivPtr& prog_derivation,
                          const std::vector<unsigned long>& inputs) {
    if (!alpha_eq(program, prog_derivation->conclusion.subject))
        throw DerivError("bound_harness: derivation does not type the program");
    DerivPtr app = prog_derivation;
    for (unsigned long n : inputs) {
        TypePtr c = canonicalize(app->conclusion.type);
        if (c->kind != StratType::Kind::Arrow)
            throw DerivError("bound_harness: program expects no more inputs");
        app = d_lolle(app, make_copy(numeral_argument(c->arg, n)));
    }
    BoundReport rep;
    rep.size = term_size(app->conclusion.subject);
    rep.degree = degree_of(app);
    rep.bound = boost::multiprecision::pow(BigInt(rep.size),
                                           static_cast<unsigned>(rep.degree + 1));
    NormalizeResult nf = normalize_typed(app, PickStrategy::LeftmostOutermost,
                                         {1});
    rep.steps = nf.steps;
    rep.output = decode_num(nf.deriv->conclusion.subject);
    rep.steps_ok = BigInt(rep.steps) <= rep.bound;
    rep.sizes_ok = true;
    for (const auto& row : nf.trace)
        if (BigInt(row.subject_size) > rep.bound) rep.sizes_ok = false;
    if (BigInt(term_size(nf.deriv->conclusion.subject)) > rep.bound)
        rep.sizes_ok = false;
    rep.pass = rep.steps_ok && rep.sizes_ok;
    return rep;
}

}  // namespace strw
