// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "strw/inference.hpp"
#include "strw/inter.hpp"
#include "strw/numerals.hpp"
#include "strw/sta.hpp"
#include "strw/transform.hpp"

using namespace strw;

namespace {

long g_checks = 0;
long g_failures = 0;
std::string g_first_failure;

void expect(bool ok, const std::string& what) {
    ++g_checks;
    if (ok) return;
    ++g_failures;
    if (g_first_failure.empty()) g_first_failure = what;
}

int g_exit = 0;

void run(int num, const std::string& title, double limit_secs,
         const std::function<void()>& body) {
    g_checks = 0;
    g_failures = 0;
    g_first_failure.clear();
    auto t0 = std::chrono::steady_clock::now();
    try {
        body();
    } catch (const std::exception& e) {
        expect(false, std::string("unexpected exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (secs >= limit_secs)
        expect(false, "over the time budget of " + std::to_string(limit_secs) + "s");
    if (g_failures == 0) {
        std::printf("PASS criterion %d: %s (%ld checks, %.2fs)\n", num,
                    title.c_str(), g_checks, secs);
    } else {
        std::printf("FAIL criterion %d: %s (%ld of %ld checks failed, %.2fs) first: %s\n",
                    num, title.c_str(), g_failures, g_checks, secs,
                    g_first_failure.c_str());
        g_exit = 1;
    }
    std::fflush(stdout);
}

BigInt bpow(unsigned long base, long exp) {
    BigInt out = 1;
    for (long i = 0; i < exp; ++i) out *= base;
    return out;
}

bool ctx_equal(const TypeContext& a, const TypeContext& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [x, ty] : a) {
        auto it = b.find(x);
        if (it == b.end() || !type_eq(ty, it->second)) return false;
    }
    return true;
}

// ------------------------------------------------------------------ corpus

std::vector<DerivPtr> build_corpus() {
    std::vector<DerivPtr> out;
    out.push_back(d_lolli(d_ax("x", parse_type("a")), "x"));
    {
        DerivPtr app = d_lolle(d_ax("x1", parse_type("{b} -o c")),
                               var_typing("x2", parse_type("{b}")));
        out.push_back(d_lolli(d_m(app, {"x1", "x2"}, "x"), "x"));
    }
    for (unsigned long n : {0ul, 6ul, 9ul}) {
        out.push_back(numeral_derivation(n, 1, 1).derivation);
        out.push_back(numeral_derivation(n, 2, 3).derivation);
    }
    for (int digit : {0, 1}) {
        out.push_back(succ_typing(digit, 1, 1).derivation);
        out.push_back(succ_typing(digit, 2, 3).derivation);
    }
    out.push_back(iter_typing(3, 0, 1, 1));
    out.push_back(d_lolle(d_lolle(iter_typing(3, 0, 1, 1),
                                  iter_succ_argument(3, 0, 1, 1)),
                          numeral_derivation(5, 1, 1).derivation));
    return out;
}

const std::vector<DerivPtr>& corpus() {
    static std::vector<DerivPtr> c = build_corpus();
    return c;
}

struct Typed {
    TermPtr term;
    DerivPtr deriv;
};

// Every strongly normalizing closed term up to size 9, with its inferred
// derivation; the shared pool behind the statistical criteria.
const std::vector<Typed>& typed_pool() {
    static std::vector<Typed> pool = [] {
        std::vector<Typed> out;
        for (const TermPtr& t : enumerate_closed_terms(9)) {
            InferResult r = infer_sn(t);
            if (r) out.push_back({t, r.deriv});
        }
        return out;
    }();
    return pool;
}

// ------------------------------------------------------------------ mutants

struct Mutant {
    DerivPtr deriv;
    std::string expected;
    Rule rule;
};

void collect_nodes(const DerivPtr& d, std::map<Rule, std::vector<DerivPtr>>& by_rule,
                   std::set<std::string>& seen) {
    std::string key = rule_name(d->rule) + "|" + print_term(d->conclusion.subject) +
                      "|" + print_type(d->conclusion.type);
    if (seen.insert(key).second && by_rule[d->rule].size() < 3)
        by_rule[d->rule].push_back(d);
    for (const auto& p : d->premises) collect_nodes(p, by_rule, seen);
}

std::vector<Mutant> build_mutants() {
    std::vector<Mutant> out;
    std::map<Rule, std::vector<DerivPtr>> by_rule;
    std::set<std::string> seen;
    for (const auto& d : corpus()) collect_nodes(d, by_rule, seen);

    // the corpus is light on weakenings, so top the pool up by hand
    while (by_rule[Rule::W].size() < 3) {
        DerivPtr w = d_w(d_ax("x", parse_type("a")), "y", parse_type("b"));
        for (size_t i = 0; i < by_rule[Rule::W].size(); ++i)
            w = d_w(w, "z" + std::to_string(i), parse_type("c"));
        by_rule[Rule::W].push_back(std::move(w));
    }

    // generic corruptions of valid nodes: exactly one facet goes wrong
    for (const auto& [rule, nodes] : by_rule) {
        for (const auto& d : nodes) {
            Judgment j = d->conclusion;
            j.type = mk_tyvar("zzmut");
            out.push_back({mk_node(rule, j, d->meta, d->premises),
                           "conclusion-type-mismatch", rule});

            j = d->conclusion;
            j.subject = mk_var("zzmut");
            out.push_back({mk_node(rule, j, d->meta, d->premises),
                           "conclusion-subject-mismatch", rule});

            j = d->conclusion;
            j.ctx["zzmut"] = mk_tyvar("a");
            out.push_back({mk_node(rule, j, d->meta, d->premises),
                           "conclusion-context-mismatch", rule});

            std::vector<DerivPtr> prems = d->premises;
            if (rule == Rule::Ax)
                prems.push_back(d);
            else
                prems.clear();
            out.push_back({mk_node(rule, d->conclusion, d->meta, std::move(prems)),
                           "bad-arity", rule});
        }
    }

    // side-condition violations, one hand-built node each
    Judgment dummy{{}, mk_var("m"), mk_tyvar("z")};
    TypePtr a = parse_type("a");
    TypePtr set_ab = parse_type("{a, b}");

    Meta m;
    m.var = "x";
    m.lintype = set_ab;
    out.push_back({mk_node(Rule::Ax, dummy, m, {}), "axiom-not-linear", Rule::Ax});
    m = Meta{};
    m.lintype = a;
    out.push_back({mk_node(Rule::Ax, dummy, m, {}), "missing-meta", Rule::Ax});

    m = Meta{};
    m.var = "y";
    m.lintype = set_ab;
    out.push_back({mk_node(Rule::W, dummy, m, {d_ax("x", a)}),
                   "weakening-not-linear", Rule::W});
    m.lintype = a;
    m.var = "x";
    out.push_back({mk_node(Rule::W, dummy, m, {d_ax("x", a)}),
                   "weakening-var-present", Rule::W});

    m = Meta{};
    m.var = "zz";
    out.push_back({mk_node(Rule::LollI, dummy, m, {d_ax("x", a)}),
                   "abstraction-var-missing", Rule::LollI});
    m.var = "y";
    out.push_back({mk_node(Rule::LollI, dummy, m, {var_typing("y", set_ab)}),
                   "abstraction-result-not-linear", Rule::LollI});

    out.push_back({mk_node(Rule::LollE, dummy, {},
                           {d_ax("x", a), d_ax("y", parse_type("b"))}),
                   "application-not-arrow", Rule::LollE});
    out.push_back({mk_node(Rule::LollE, dummy, {},
                           {d_ax("x", parse_type("{a} -o b")),
                            var_typing("x", parse_type("{a}"))}),
                   "contexts-not-disjoint", Rule::LollE});
    out.push_back({mk_node(Rule::LollE, dummy, {},
                           {d_ax("f", parse_type("{a} -o b")),
                            var_typing("y", parse_type("{c}"))}),
                   "argument-type-mismatch", Rule::LollE});

    m = Meta{};
    m.range_var = "x";
    out.push_back({mk_node(Rule::M, dummy, m, {d_ax("x", a)}),
                   "multiplexor-domain-invalid", Rule::M});
    m.domain_vars = {"x", "x"};
    out.push_back({mk_node(Rule::M, dummy, m, {d_ax("x", a)}),
                   "multiplexor-domain-invalid", Rule::M});
    m.domain_vars = {"zz"};
    out.push_back({mk_node(Rule::M, dummy, m, {d_ax("x", a)}),
                   "multiplexor-var-missing", Rule::M});
    m.domain_vars = {"x"};
    m.range_var = "y";
    out.push_back({mk_node(Rule::M, dummy, m,
                           {d_w(d_ax("x", a), "y", parse_type("b"))}),
                   "multiplexor-target-clash", Rule::M});

    out.push_back({mk_node(Rule::St, dummy, {},
                           {d_ax("x", a), d_ax("y", parse_type("b"))}),
                   "stratification-subject-mismatch", Rule::St});
    out.push_back({mk_node(Rule::St, dummy, {},
                           {d_ax("x", a),
                            d_w(d_ax("x", parse_type("b")), "y", parse_type("c"))}),
                   "contexts-not-compatible", Rule::St});

    m = Meta{};
    m.tyvar = "c";
    out.push_back({mk_node(Rule::ForallI, dummy, m, {var_typing("x", set_ab)}),
                   "quantifier-over-set", Rule::ForallI});
    m.tyvar = "a";
    out.push_back({mk_node(Rule::ForallI, dummy, m, {d_ax("x", a)}),
                   "quantifier-var-free-in-context", Rule::ForallI});
    m.tyvar.clear();
    out.push_back({mk_node(Rule::ForallI, dummy, m, {d_ax("x", a)}),
                   "missing-meta", Rule::ForallI});

    m = Meta{};
    m.instantiated_with = set_ab;
    out.push_back({mk_node(Rule::ForallE, dummy, m, {d_ax("x", a)}),
                   "instantiation-not-linear", Rule::ForallE});
    m.instantiated_with = parse_type("b");
    out.push_back({mk_node(Rule::ForallE, dummy, m, {d_ax("x", a)}),
                   "instantiation-not-forall", Rule::ForallE});

    return out;
}

// ---------------------------------------------------------------- criteria

void criterion_rule_fidelity() {
    for (const auto& d : corpus()) {
        auto v = check(d);
        expect(!v, "corpus derivation rejected: " + (v ? v->reason : ""));
    }
    std::vector<Mutant> mutants = build_mutants();
    std::map<Rule, long> per_rule;
    for (const auto& mu : mutants) {
        auto v = check(mu.deriv);
        if (!v) {
            expect(false, "mutant accepted (" + rule_name(mu.rule) +
                              ", wanted " + mu.expected + ")");
            continue;
        }
        expect(v->reason == mu.expected,
               "mutant for " + rule_name(mu.rule) + ": got " + v->reason +
                   ", wanted " + mu.expected);
        ++per_rule[mu.rule];
    }
    expect(mutants.size() >= 80,
           "only " + std::to_string(mutants.size()) + " mutants");
    for (int r = 0; r < 8; ++r)
        expect(per_rule[static_cast<Rule>(r)] >= 10,
               "fewer than 10 mutants for " + rule_name(static_cast<Rule>(r)));
}

void check_measures(const DerivPtr& d) {
    Measures ms = measures(d);
    expect(ms.weight_at(1) == BigInt(ms.subject_size),
           "weight at 1 differs from subject size");
    expect(ms.rank <= ms.subject_size, "rank above subject size");
    for (unsigned long r : {1ul, 2ul, 3ul, 5ul, 8ul})
        expect(ms.weight_at(r) <= bpow(r, ms.degree) * ms.subject_size,
               "weight bound broken at r=" + std::to_string(r));
}

void criterion_measures() {
    for (const auto& d : corpus()) check_measures(d);
    expect(typed_pool().size() >= 1000,
           "typed pool too small: " + std::to_string(typed_pool().size()));
    for (const auto& e : typed_pool()) check_measures(e.deriv);
}

void check_one_reduction(const DerivPtr& d, const RedexPosition& at) {
    Measures before = measures(d);
    auto [d2, report] = subject_reduce(d, at);
    (void)report;
    auto v = check(d2);
    expect(!v, "reduct derivation invalid: " + (v ? v->reason : ""));
    expect(weight_at(d2, before.rank) < before.weight_at(before.rank),
           "no strict weight decrease at the rank");
    expect(type_eq(d2->conclusion.type, d->conclusion.type),
           "type not preserved");
    expect(ctx_equal(d2->conclusion.ctx, d->conclusion.ctx),
           "context not preserved");
}

void criterion_subject_reduction() {
    reset_subst_stats();
    reset_reduce_stats();
    for (const auto& d : corpus())
        for (const auto& pos : redex_positions(d->conclusion.subject))
            check_one_reduction(d, pos);

    std::mt19937 rng(2026);
    long randomized = 0;
    for (const auto& e : typed_pool()) {
        auto rs = redex_positions(e.term);
        if (rs.empty()) continue;
        check_one_reduction(e.deriv, rs[rng() % rs.size()]);
        ++randomized;
    }
    expect(randomized >= 1000,
           "only " + std::to_string(randomized) + " randomized reductions");
    expect(reduce_stats().weight_violations == 0,
           "reduction weight accounting reported violations");
}

void criterion_step_bound() {
    for (const auto& e : typed_pool()) {
        Measures ms = measures(e.deriv);
        BigInt bound = bpow(static_cast<unsigned long>(ms.subject_size),
                            ms.degree + 1);
        NormalizeResult nr = normalize_typed(e.deriv,
                                             PickStrategy::LeftmostOutermost, {1});
        expect(BigInt(nr.steps) <= bound, "step count over the bound");
        for (const auto& row : nr.trace)
            expect(BigInt(row.subject_size) <= bound,
                   "intermediate subject over the bound");
    }
    for (int k = 1; k <= 5; ++k) {
        TermPtr prog_term = mk_app(iter_term(k), succ_typing(0, 1, 1).term);
        DerivPtr prog = d_lolle(iter_typing(k, 0, 1, 1),
                                iter_succ_argument(k, 0, 1, 1));
        for (unsigned long n = 0; n <= 10; ++n) {
            BoundReport rep = bound_harness(prog_term, prog, {n});
            expect(rep.pass, "iteration bound report failed at k=" +
                                 std::to_string(k) + ", n=" + std::to_string(n));
            expect(rep.output == n << k, "iteration output wrong at k=" +
                                             std::to_string(k) +
                                             ", n=" + std::to_string(n));
        }
    }
}

void criterion_sn_characterization() {
    long pool_hits = 0;
    for (const TermPtr& t : enumerate_closed_terms(9)) {
        SnVerdict v = is_sn(t, 100000);
        expect(v != SnVerdict::Unknown,
               "no termination verdict for " + print_term(t));
        InferResult r = infer_sn(t);
        expect((v == SnVerdict::Yes) == static_cast<bool>(r),
               "termination and inference disagree on " + print_term(t));
        if (r) {
            auto bad = check(r.deriv);
            expect(!bad, "inferred derivation invalid for " + print_term(t));
            expect(alpha_eq(r.deriv->conclusion.subject, t),
                   "inferred subject differs for " + print_term(t));
            ++pool_hits;
        }
    }
    expect(pool_hits == static_cast<long>(typed_pool().size()),
           "pool and exhaustive pass disagree");
    for (const char* src :
         {"(\\x. x x) (\\x. x x)", "(\\x. x x x) (\\x. x x x)"}) {
        InferResult r = infer_sn(parse_term(src));
        expect(!r, std::string("divergent term typed: ") + src);
        expect(r.fail_reason == "fuel",
               std::string("divergent term failed for another reason: ") + src);
    }
}

void criterion_substitution_accounting() {
    SubstStats st = subst_stats();
    expect(st.calls > 0, "no substitutions were exercised");
    expect(st.violations == 0,
           std::to_string(st.violations) + " substitution weight violations");
}

void check_embedding(const StaDerivPtr& sd) {
    auto sv = check_sta(sd);
    expect(!sv, "modal corpus derivation rejected: " + (sv ? sv->reason : ""));
    DerivPtr tr = translate_derivation(sd);
    auto v = check(tr);
    expect(!v, "translated derivation rejected: " + (v ? v->reason : ""));
    expect(print_term(tr->conclusion.subject) ==
               print_term(sd->conclusion.subject),
           "translation changed the subject");
    expect(type_eq(tr->conclusion.type, translate_type(sd->conclusion.type)),
           "translated conclusion type differs");
    expect(tr->conclusion.ctx.size() == sd->conclusion.ctx.size(),
           "translated context size differs");
    for (const auto& [x, ty] : sd->conclusion.ctx) {
        auto it = tr->conclusion.ctx.find(x);
        expect(it != tr->conclusion.ctx.end() &&
                   type_eq(it->second, translate_type(ty)),
               "translated context entry differs at " + x);
    }
    StaMeasures sm = sta_measures(sd);
    Measures tm = measures(tr);
    for (unsigned long r : {1ul, 2ul, 3ul})
        expect(sm.weight_at(r) == tm.weight_at(r),
               "weights diverge at r=" + std::to_string(r));
    expect(sm.degree == tm.degree, "promotion and stratification depth differ");
}

void criterion_modal_embedding() {
    for (unsigned long n : {0ul, 1ul, 6ul, 9ul, 27ul})
        for (auto [h, k] : {std::pair{1, 1}, std::pair{2, 3}}) {
            StaDerivPtr sd = sta_numeral_derivation(n, h, k);
            check_embedding(sd);
            expect(sta_measures(sd).degree == 0, "modal numeral has promotion depth");
            expect(degree_of(translate_derivation(sd)) == 0,
                   "translated numeral has stratification depth");
        }
    for (int digit : {0, 1})
        for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 3}})
            check_embedding(sta_succ_derivation(digit, m, n));
}

void criterion_numeral_semantics() {
    TermPtr succ0 = succ_typing(0, 1, 1).term;
    TermPtr succ1 = succ_typing(1, 1, 1).term;
    for (unsigned long n = 0; n <= 256; ++n) {
        for (int digit : {0, 1}) {
            ReduceResult rr = reduce_to_nf(
                mk_app(digit ? succ1 : succ0, encode_num(n)), 100000);
            expect(!rr.fuel_exhausted, "successor did not normalize");
            expect(decode_num(rr.term) == 2 * n + digit,
                   "successor value wrong at n=" + std::to_string(n));
        }
    }
    for (unsigned long n = 0; n <= 65536; ++n)
        expect(decode_num(encode_num(n)) == n,
               "round trip broken at n=" + std::to_string(n));
}

// random stratified types whose sets all keep at least two distinct members
struct TypeGen {
    std::mt19937 rng;

    TypePtr tyvar() {
        return mk_tyvar(std::string(1, static_cast<char>('a' + rng() % 4)));
    }

    TypePtr linear(int depth) {
        if (depth == 0 || rng() % 3 == 0) return tyvar();
        if (rng() % 4 == 0)
            return mk_forall(std::string(1, static_cast<char>('a' + rng() % 4)),
                             linear(depth - 1));
        return mk_arrow(strat(depth - 1), linear(depth - 1));
    }

    TypePtr strat(int depth) {
        if (depth == 0 || rng() % 2 == 0) return linear(depth);
        size_t n = 2 + rng() % 2;
        std::vector<TypePtr> comps;
        for (size_t i = 0; i < n; ++i) comps.push_back(strat(depth - 1));
        return mk_strat(std::move(comps));
    }
};

bool degenerate(const TypePtr& t) {
    if (t->kind == StratType::Kind::Strat) {
        if (canonicalize(t)->comps.size() < 2) return true;
        for (const auto& c : t->comps)
            if (degenerate(c)) return true;
    }
    if (t->arg && degenerate(t->arg)) return true;
    if (t->res && degenerate(t->res)) return true;
    return false;
}

void criterion_intersection_view() {
    TypeGen gen{std::mt19937(17)};
    std::vector<TypePtr> pool;
    while (pool.size() < 200) {
        TypePtr t = gen.strat(3);
        if (!degenerate(t)) pool.push_back(t);
    }
    std::mt19937 pick(19);
    for (int i = 0; i < 1000; ++i) {
        const TypePtr& s = pool[pick() % pool.size()];
        const TypePtr& t = pool[pick() % pool.size()];
        expect(type_eq(s, t) == inter_eq(to_inter(s), to_inter(t)),
               "equalities disagree on " + print_type(s) + " vs " +
                   print_type(t));
    }
    expect(!type_eq(parse_type("{{a}, b}"), parse_type("{a, b}")),
           "nesting collapsed in the set syntax");
    expect(!type_eq(parse_type("{{a, b}, c}"), parse_type("{a, {b, c}}")),
           "set nesting associated");
    expect(!inter_eq(to_inter(parse_type("{{a, b}, c}")),
                     to_inter(parse_type("{a, {b, c}}"))),
           "meets associated");
    expect(type_eq(parse_type("{a, b}"), parse_type("{b, a}")),
           "sets not commutative");
    expect(inter_eq(to_inter(parse_type("{a, b}")),
                    to_inter(parse_type("{b, a}"))),
           "meets not commutative");
    expect(type_eq(parse_type("{a, a}"), parse_type("{a}")),
           "sets not idempotent");
    expect(inter_eq(to_inter(parse_type("{a, a}")), to_inter(parse_type("{a}"))),
           "meets not idempotent");
}

}  // namespace

int main() {
    run(1, "checker accepts the corpus, rejects mutants with exact reasons",
        5.0, criterion_rule_fidelity);
    run(2, "measure identities on the corpus and the inferred pool", 60.0,
        criterion_measures);
    run(3, "weighted subject reduction preserves judgments and shrinks", 60.0,
        criterion_subject_reduction);
    run(4, "normalization respects the size-degree step bound", 60.0,
        criterion_step_bound);
    run(5, "strong normalization coincides with inferability", 600.0,
        criterion_sn_characterization);
    run(6, "substitution weight accounting stayed clean", 5.0,
        criterion_substitution_accounting);
    run(7, "modal derivations embed with matching measures", 60.0,
        criterion_modal_embedding);
    run(8, "numeral codec and successor semantics", 60.0,
        criterion_numeral_semantics);
    run(9, "intersection view tracks set-type equality", 60.0,
        criterion_intersection_view);
    return g_exit;
}
