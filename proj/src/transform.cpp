#include "strw/transform.hpp"

#include <algorithm>
#include <random>

namespace strw {

namespace {
SubstStats g_subst;
ReduceStats g_reduce;
}  // namespace

SubstStats subst_stats() { return g_subst; }
void reset_subst_stats() { g_subst = SubstStats{}; }
ReduceStats reduce_stats() { return g_reduce; }
void reset_reduce_stats() { g_reduce = ReduceStats{}; }

// ---------------------------------------------- type variable substitution

DerivPtr subst_tyvar_deriv(const DerivPtr& d, const std::string& a,
                           const TypePtr& b) {
    if (!b || !is_linear(b))
        throw DerivError("subst_tyvar_deriv: replacement must be linear");
    switch (d->rule) {
        case Rule::Ax:
            return d_ax(d->meta.var, subst_tyvar(d->meta.lintype, a, b));
        case Rule::W:
            return d_w(subst_tyvar_deriv(d->premises[0], a, b), d->meta.var,
                       subst_tyvar(d->meta.lintype, a, b));
        case Rule::LollI:
            return d_lolli(subst_tyvar_deriv(d->premises[0], a, b), d->meta.var);
        case Rule::LollE:
            return d_lolle(subst_tyvar_deriv(d->premises[0], a, b),
                           subst_tyvar_deriv(d->premises[1], a, b));
        case Rule::M:
            return d_m(subst_tyvar_deriv(d->premises[0], a, b),
                       d->meta.domain_vars, d->meta.range_var);
        case Rule::St: {
            std::vector<DerivPtr> ps;
            ps.reserve(d->premises.size());
            for (const auto& p : d->premises)
                ps.push_back(subst_tyvar_deriv(p, a, b));
            return d_st(std::move(ps));
        }
        case Rule::ForallI: {
            if (d->meta.tyvar == a) return d;  // a rebound below here
            if (free_tyvars(b).count(d->meta.tyvar)) {
                // rename the binder out of the way first
                std::string c = fresh_tyvar_name();
                DerivPtr renamed =
                    subst_tyvar_deriv(d->premises[0], d->meta.tyvar, mk_tyvar(c));
                return d_foralli(subst_tyvar_deriv(renamed, a, b), c);
            }
            return d_foralli(subst_tyvar_deriv(d->premises[0], a, b),
                             d->meta.tyvar);
        }
        case Rule::ForallE:
            return d_foralle(subst_tyvar_deriv(d->premises[0], a, b),
                             subst_tyvar(d->meta.instantiated_with, a, b));
    }
    throw DerivError("subst_tyvar_deriv: unknown rule");
}

// --------------------------------------------- derivation-level substitution

namespace {

using SigMap = std::map<std::string, DerivPtr>;

// Stratification premises of one substituted derivation, each handed out to
// a consumer needing its type. Handing out prefers untouched premises, then
// reuses; a miss is a bug in the caller.
struct Pool {
    std::vector<DerivPtr> prems;
    std::vector<char> used;

    explicit Pool(std::vector<DerivPtr> ps)
        : prems(std::move(ps)), used(prems.size(), 0) {}

    size_t take(const TypePtr& ty) {
        int reuse = -1;
        for (size_t i = 0; i < prems.size(); ++i) {
            if (!type_eq(prems[i]->conclusion.type, ty)) continue;
            if (!used[i]) {
                used[i] = 1;
                return i;
            }
            if (reuse < 0) reuse = static_cast<int>(i);
        }
        if (reuse >= 0) return static_cast<size_t>(reuse);
        throw DerivError("substitution: no stratification premise of the needed type");
    }

    bool all_used() const {
        return std::all_of(used.begin(), used.end(), [](char u) { return u != 0; });
    }
};

DerivPtr subst_core(const SigMap& sig, const DerivPtr& pi) {
    if (sig.empty()) return pi;
    switch (pi->rule) {
        case Rule::Ax: {
            auto it = sig.find(pi->meta.var);
            return it != sig.end() ? it->second : pi;
        }
        case Rule::W: {
            auto it = sig.find(pi->meta.var);
            if (it == sig.end())
                return d_w(subst_core(sig, pi->premises[0]), pi->meta.var,
                           pi->meta.lintype);
            // the variable is unused: keep its replacement's context alive
            // through weakenings
            SigMap inner = sig;
            inner.erase(pi->meta.var);
            DerivPtr cur = subst_core(inner, pi->premises[0]);
            for (const auto& [z, ty] : it->second->conclusion.ctx)
                cur = weaken(cur, z, ty);
            return cur;
        }
        case Rule::LollI:
            return d_lolli(subst_core(sig, pi->premises[0]), pi->meta.var);
        case Rule::LollE: {
            SigMap s0, s1;
            const TypeContext& c0 = pi->premises[0]->conclusion.ctx;
            const TypeContext& c1 = pi->premises[1]->conclusion.ctx;
            for (const auto& [x, sd] : sig) {
                if (c0.count(x))
                    s0.emplace(x, sd);
                else if (c1.count(x))
                    s1.emplace(x, sd);
                else
                    throw DerivError("substitution: variable lost at application");
            }
            return d_lolle(subst_core(s0, pi->premises[0]),
                           subst_core(s1, pi->premises[1]));
        }
        case Rule::M: {
            auto it = sig.find(pi->meta.range_var);
            if (it == sig.end())
                return d_m(subst_core(sig, pi->premises[0]), pi->meta.domain_vars,
                           pi->meta.range_var);
            StratSplit split = stratified_premises(it->second);
            Pool pool(split.premises);
            SigMap inner = sig;
            inner.erase(pi->meta.range_var);
            // one fresh copy of a matching stratification premise per occurrence
            std::vector<std::map<std::string, std::string>> rens;
            for (const auto& xk : pi->meta.domain_vars) {
                TypePtr need = pi->premises[0]->conclusion.ctx.at(xk);
                size_t idx = pool.take(need);
                std::map<std::string, std::string> ren;
                inner[xk] = make_copy(split.premises[idx], ren);
                rens.push_back(std::move(ren));
            }
            DerivPtr cur = subst_core(inner, pi->premises[0]);
            // premises whose type only occurred as a duplicate still owe their
            // share of the context union; pad them in by weakening
            std::vector<std::map<std::string, std::string>> pads;
            for (size_t u = 0; u < split.premises.size(); ++u) {
                if (pool.used[u]) continue;
                std::map<std::string, std::string> ren;
                for (const auto& [z, ty] : split.premises[u]->conclusion.ctx) {
                    std::string w = fresh_name();
                    cur = weaken(cur, w, ty);
                    ren[z] = w;
                }
                pads.push_back(std::move(ren));
            }
            // contract every copy back onto the shared context names
            if (!split.premises.empty()) {
                for (const auto& [z, ty] : split.premises[0]->conclusion.ctx) {
                    (void)ty;
                    std::vector<std::string> names;
                    for (const auto& ren : rens) names.push_back(ren.at(z));
                    for (const auto& ren : pads) names.push_back(ren.at(z));
                    cur = d_m(cur, std::move(names), z);
                }
            }
            return apply_suffix(cur, split.suffix);
        }
        case Rule::St: {
            std::map<std::string, StratSplit> splits;
            std::map<std::string, Pool> pools;
            for (const auto& [v, sd] : sig) {
                StratSplit sp = stratified_premises(sd);
                pools.emplace(v, Pool(sp.premises));
                splits.emplace(v, std::move(sp));
            }
            // the matching component derivation is shared, not copied, so the
            // premise contexts stay pointwise compatible
            std::vector<DerivPtr> ps;
            ps.reserve(pi->premises.size());
            for (const auto& prem : pi->premises) {
                SigMap sub;
                for (const auto& [v, sd] : sig) {
                    (void)sd;
                    TypePtr need = prem->conclusion.ctx.at(v);
                    size_t idx = pools.at(v).take(need);
                    sub.emplace(v, splits.at(v).premises[idx]);
                }
                ps.push_back(subst_core(sub, prem));
            }
            for (const auto& [v, pool] : pools)
                if (!pool.all_used())
                    throw DerivError(
                        "substitution: unused stratification premise with a "
                        "duplicated type");
            DerivPtr cur = d_st(std::move(ps));
            for (const auto& [v, sp] : splits) {
                (void)v;
                cur = apply_suffix(cur, sp.suffix);
            }
            return cur;
        }
        case Rule::ForallI: {
            bool clash = false;
            for (const auto& [v, sd] : sig) {
                (void)v;
                if (free_tyvars(sd->conclusion.ctx).count(pi->meta.tyvar))
                    clash = true;
            }
            if (clash) {
                std::string c = fresh_tyvar_name();
                DerivPtr renamed =
                    subst_tyvar_deriv(pi->premises[0], pi->meta.tyvar, mk_tyvar(c));
                return d_foralli(subst_core(sig, renamed), c);
            }
            return d_foralli(subst_core(sig, pi->premises[0]), pi->meta.tyvar);
        }
        case Rule::ForallE:
            return d_foralle(subst_core(sig, pi->premises[0]),
                             pi->meta.instantiated_with);
    }
    throw DerivError("substitution: unknown rule");
}

}  // namespace

DerivPtr subst_derivation(const std::vector<DerivPtr>& sigmas_in,
                          const DerivPtr& pi_in,
                          const std::vector<std::string>& vars) {
    if (sigmas_in.size() != vars.size())
        throw DerivError("subst_derivation: arity mismatch");
    DerivPtr pi = freshen_internal(make_clean(pi_in));
    std::vector<DerivPtr> sigmas;
    sigmas.reserve(sigmas_in.size());
    for (const auto& s : sigmas_in)
        sigmas.push_back(freshen_internal(make_clean(s)));

    std::set<std::string> taken;
    for (const auto& [x, ty] : pi->conclusion.ctx) {
        (void)ty;
        taken.insert(x);
    }
    std::set<std::string> seen;
    SigMap sig;
    for (size_t i = 0; i < vars.size(); ++i) {
        if (!seen.insert(vars[i]).second)
            throw DerivError("subst_derivation: duplicate variable " + vars[i]);
        auto it = pi->conclusion.ctx.find(vars[i]);
        if (it == pi->conclusion.ctx.end())
            throw DerivError("subst_derivation: variable not in context: " + vars[i]);
        if (!type_eq(it->second, sigmas[i]->conclusion.type))
            throw DerivError("subst_derivation: type mismatch for " + vars[i]);
        for (const auto& [z, ty] : sigmas[i]->conclusion.ctx) {
            (void)ty;
            if (!taken.insert(z).second)
                throw DerivError("subst_derivation: context clash on " + z);
        }
        sig.emplace(vars[i], sigmas[i]);
    }

    DerivPtr result = subst_core(sig, pi);

    // weighted bookkeeping: the combined weight must not exceed the weight of
    // pi plus the weights of the replacements actually used
    unsigned long r = static_cast<unsigned long>(rank_of(pi));
    for (const auto& s : sigmas)
        r = std::max(r, static_cast<unsigned long>(rank_of(s)));
    BigInt bound = weight_at(pi, r);
    auto fv = free_vars(pi->conclusion.subject);
    for (size_t i = 0; i < vars.size(); ++i)
        if (fv.count(vars[i])) bound += weight_at(sigmas[i], r);
    ++g_subst.calls;
    if (weight_at(result, r) > bound) ++g_subst.violations;
    return result;
}

// ----------------------------------------------------- quantifier plumbing

namespace {

DerivPtr replace_at(const DerivPtr& d, const std::vector<int>& at, size_t k,
                    const DerivPtr& sub) {
    if (k == at.size()) return sub;
    int i = at[k];
    if (i < 0 || static_cast<size_t>(i) >= d->premises.size())
        throw DerivError("eliminate_forall_detour: bad path");
    std::vector<DerivPtr> ps = d->premises;
    ps[static_cast<size_t>(i)] = replace_at(ps[static_cast<size_t>(i)], at, k + 1, sub);
    return mk_node(d->rule, d->conclusion, d->meta, std::move(ps));
}

}  // namespace

DerivPtr eliminate_forall_detour(const DerivPtr& d, const std::vector<int>& at) {
    DerivPtr node = d;
    for (int i : at) {
        if (i < 0 || static_cast<size_t>(i) >= node->premises.size())
            throw DerivError("eliminate_forall_detour: bad path");
        node = node->premises[static_cast<size_t>(i)];
    }
    if (node->rule != Rule::ForallE || node->premises[0]->rule != Rule::ForallI)
        throw DerivError(
            "eliminate_forall_detour: not an elimination directly over an "
            "introduction");
    const DerivPtr& intro = node->premises[0];
    DerivPtr sub = subst_tyvar_deriv(intro->premises[0], intro->meta.tyvar,
                                     node->meta.instantiated_with);
    // the replaced subtree proves the same judgment, so the surrounding
    // nodes keep their conclusions
    return replace_at(d, at, 0, sub);
}

DerivPtr reorder_renaming_quantifier(const DerivPtr& d, size_t len) {
    std::vector<DerivPtr> chain;  // root first
    DerivPtr cur = d;
    for (size_t k = 0; k < len; ++k) {
        switch (cur->rule) {
            case Rule::W:
            case Rule::M:
            case Rule::ForallI:
            case Rule::ForallE:
                break;
            default:
                throw DerivError(
                    "reorder_renaming_quantifier: chain must consist of "
                    "renamings and quantifier rules");
        }
        chain.push_back(cur);
        cur = cur->premises[0];
    }
    std::vector<DerivPtr> app(chain.rbegin(), chain.rend());
    std::stable_partition(app.begin(), app.end(), [](const DerivPtr& n) {
        return n->rule == Rule::ForallI || n->rule == Rule::ForallE;
    });
    return apply_suffix(cur, app);
}

// -------------------------------------------------------- subject reduction

namespace {

bool is_renaming_rule(Rule r) {
    return r == Rule::W || r == Rule::M || r == Rule::ForallI ||
           r == Rule::ForallE;
}

// Reduces the redex sitting at the root of the subject.
DerivPtr sr_root(const DerivPtr& d, DetourReport& rep) {
    if (!is_linear(d->conclusion.type)) {
        StratSplit split = stratified_premises(d);
        std::vector<DerivPtr> ps;
        ps.reserve(split.premises.size());
        for (const auto& p : split.premises) ps.push_back(sr_root(p, rep));
        return apply_suffix(d_st(std::move(ps)), split.suffix);
    }
    // peel renamings and quantifiers down to the application
    std::vector<DerivPtr> chain2;
    DerivPtr app = d;
    while (is_renaming_rule(app->rule)) {
        chain2.push_back(app);
        app = app->premises[0];
    }
    if (app->rule != Rule::LollE)
        throw DerivError("subject_reduce: no application at the redex");
    std::reverse(chain2.begin(), chain2.end());

    // and again from the function premise down to the abstraction
    std::vector<DerivPtr> chain1;
    DerivPtr lam = app->premises[0];
    while (is_renaming_rule(lam->rule)) {
        chain1.push_back(lam);
        lam = lam->premises[0];
    }
    if (lam->rule != Rule::LollI)
        throw DerivError("subject_reduce: no abstraction at the redex");
    std::reverse(chain1.begin(), chain1.end());

    std::vector<DerivPtr> quants, renames;
    for (const auto& n : chain1) {
        if (n->rule == Rule::ForallI || n->rule == Rule::ForallE)
            quants.push_back(n);
        else
            renames.push_back(n);
    }

    // replay the quantifier moves; every elimination lands on the
    // introduction just replayed, because the underlying type is an arrow
    DerivPtr cur = lam;
    for (const auto& q : quants) {
        if (q->rule == Rule::ForallI) {
            cur = d_foralli(cur, q->meta.tyvar);
        } else {
            if (cur->rule != Rule::ForallI)
                throw DerivError("subject_reduce: quantifier chain out of order");
            cur = subst_tyvar_deriv(cur->premises[0], cur->meta.tyvar,
                                    q->meta.instantiated_with);
            ++rep.forall_detours_removed;
        }
    }
    if (cur->rule != Rule::LollI)
        throw DerivError("subject_reduce: abstraction lost under quantifiers");

    DerivPtr reduced =
        subst_derivation({app->premises[1]}, cur->premises[0], {cur->meta.var});
    ++rep.loll_detours_removed;
    reduced = apply_suffix(reduced, renames);
    return apply_suffix(reduced, chain2);
}

DerivPtr sr_at(const DerivPtr& d, const RedexPosition& at, size_t k,
               DetourReport& rep) {
    if (k == at.size()) return sr_root(d, rep);
    switch (d->rule) {
        case Rule::W:
            return d_w(sr_at(d->premises[0], at, k, rep), d->meta.var,
                       d->meta.lintype);
        case Rule::M:
            return d_m(sr_at(d->premises[0], at, k, rep), d->meta.domain_vars,
                       d->meta.range_var);
        case Rule::ForallI:
            return d_foralli(sr_at(d->premises[0], at, k, rep), d->meta.tyvar);
        case Rule::ForallE:
            return d_foralle(sr_at(d->premises[0], at, k, rep),
                             d->meta.instantiated_with);
        case Rule::St: {
            std::vector<DerivPtr> ps;
            ps.reserve(d->premises.size());
            for (const auto& p : d->premises)
                ps.push_back(sr_at(p, at, k, rep));
            return d_st(std::move(ps));
        }
        case Rule::LollI:
            if (at[k] != Step::Body)
                throw DerivError("subject_reduce: path does not match the subject");
            return d_lolli(sr_at(d->premises[0], at, k + 1, rep), d->meta.var);
        case Rule::LollE:
            if (at[k] == Step::Fun)
                return d_lolle(sr_at(d->premises[0], at, k + 1, rep),
                               d->premises[1]);
            if (at[k] == Step::Arg)
                return d_lolle(d->premises[0],
                               sr_at(d->premises[1], at, k + 1, rep));
            throw DerivError("subject_reduce: path does not match the subject");
        case Rule::Ax:
            throw DerivError("subject_reduce: path does not match the subject");
    }
    throw DerivError("subject_reduce: unknown rule");
}

}  // namespace

std::pair<DerivPtr, DetourReport> subject_reduce(const DerivPtr& d,
                                                 const RedexPosition& at) {
    if (auto v = check(d))
        throw DerivError("subject_reduce: invalid derivation (" + v->reason + ")");
    auto red = subterm_at(d->conclusion.subject, at);
    if (!red || (*red)->kind != Term::Kind::App ||
        (*red)->left->kind != Term::Kind::Abs)
        throw NotARedex("subject_reduce: position is not a redex");

    unsigned long r = static_cast<unsigned long>(rank_of(d));
    BigInt before = weight_at(d, r);
    DetourReport rep;
    DerivPtr result = sr_at(make_clean(d), at, 0, rep);
    ++g_reduce.steps;
    if (weight_at(result, r) >= before) ++g_reduce.weight_violations;
    return {result, rep};
}

NormalizeResult normalize_typed(const DerivPtr& d, PickStrategy strategy,
                                const std::vector<unsigned long>& trace_rs,
                                unsigned seed) {
    NormalizeResult res;
    res.deriv = d;
    std::mt19937 rng(seed);
    auto record = [&](long step) {
        if (trace_rs.empty()) return;
        NormalizeTraceRow row;
        row.step = step;
        row.subject_size = term_size(res.deriv->conclusion.subject);
        for (unsigned long r : trace_rs)
            row.weights.push_back(weight_at(res.deriv, r));
        res.trace.push_back(std::move(row));
    };
    record(0);
    while (true) {
        auto poss = redex_positions(res.deriv->conclusion.subject);
        if (poss.empty()) break;
        size_t pick = 0;
        if (strategy == PickStrategy::Random && poss.size() > 1) {
            std::uniform_int_distribution<size_t> u(0, poss.size() - 1);
            pick = u(rng);
        }
        res.deriv = subject_reduce(res.deriv, poss[pick]).first;
        ++res.steps;
        record(res.steps);
    }
    return res;
}

}  // namespace strw
