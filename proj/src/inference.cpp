#include "strw/inference.hpp"

#include <algorithm>
#include <functional>

namespace strw {

// ------------------------------------------------------- subject alignment

namespace {

// binder correspondence with shadowing, innermost last
struct BinderStack {
    std::vector<std::pair<std::string, std::string>> stack;

    const std::string* lookup_sub(const std::string& s) const {
        for (auto it = stack.rbegin(); it != stack.rend(); ++it)
            if (it->first == s) return &it->second;
        return nullptr;
    }
    bool tgt_bound(const std::string& t) const {
        for (auto it = stack.rbegin(); it != stack.rend(); ++it)
            if (it->second == t) return true;
        return false;
    }
};

void collect_pairs(const TermPtr& sub, const TermPtr& tgt, BinderStack& bs,
                   std::map<std::string, std::string>& out) {
    if (sub->kind != tgt->kind)
        throw DerivError("rename_merge_to: subject shape mismatch");
    switch (sub->kind) {
        case Term::Kind::Var: {
            const std::string* b = bs.lookup_sub(sub->name);
            if (b) {
                if (*b != tgt->name)
                    throw DerivError("rename_merge_to: bound variable mismatch");
                return;
            }
            if (bs.tgt_bound(tgt->name))
                throw DerivError("rename_merge_to: free variable maps to a binder");
            auto it = out.find(sub->name);
            if (it != out.end() && it->second != tgt->name)
                throw DerivError("rename_merge_to: inconsistent variable mapping");
            out[sub->name] = tgt->name;
            return;
        }
        case Term::Kind::Abs:
            bs.stack.push_back({sub->name, tgt->name});
            collect_pairs(sub->left, tgt->left, bs, out);
            bs.stack.pop_back();
            return;
        case Term::Kind::App:
            collect_pairs(sub->left, tgt->left, bs, out);
            collect_pairs(sub->right, tgt->right, bs, out);
            return;
    }
}

}  // namespace

DerivPtr rename_merge_to(const DerivPtr& d, const TermPtr& target) {
    std::map<std::string, std::string> phi;
    BinderStack bs;
    collect_pairs(d->conclusion.subject, target, bs, phi);
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& [s, t] : phi) groups[t].push_back(s);
    std::map<std::string, std::string> ren;
    std::vector<std::pair<std::vector<std::string>, std::string>> merges;
    for (const auto& [t, ss] : groups) {
        if (ss.size() == 1) {
            if (ss[0] != t) ren[ss[0]] = t;
        } else {
            // shared target: rename apart first, then contract
            std::vector<std::string> tmp;
            for (const auto& s : ss) {
                std::string f = fresh_name();
                ren[s] = f;
                tmp.push_back(f);
            }
            merges.push_back({std::move(tmp), t});
        }
    }
    DerivPtr cur = ren.empty() ? d : rename_free_deriv(d, ren);
    for (const auto& [dom, t] : merges) cur = d_m(cur, dom, t);
    return cur;
}

// ------------------------------------------------------------- the engine

namespace {

struct Infer {
    long fuel;
    long depth = 0;

    void spend() {
        if (--fuel < 0) throw FuelExhausted("inference: fuel exhausted");
    }

    // go() nests one level per eliminated head redex, so divergent terms
    // would pile up call frames long before the fuel runs out
    struct DepthGuard {
        Infer& in;
        explicit DepthGuard(Infer& i) : in(i) {
            if (++in.depth > 4000)
                throw FuelExhausted("inference: recursion too deep");
        }
        ~DepthGuard() { --in.depth; }
    };

    DerivPtr linearize(const DerivPtr& d) {
        if (is_linear(d->conclusion.type)) return d;
        return linear_component_typing(d, 0);
    }

    // -------- closure-rule inference; conclusion subject is exactly t

    DerivPtr go(const TermPtr& t) {
        DepthGuard guard(*this);
        spend();
        if (t->kind == Term::Kind::Abs) {
            DerivPtr body = go(t->left);
            if (!body->conclusion.ctx.count(t->name))
                body = d_w(body, t->name, mk_tyvar(fresh_tyvar_name()));
            return d_lolli(body, t->name);
        }
        TermPtr h = t;
        std::vector<TermPtr> args;
        while (h->kind == Term::Kind::App) {
            args.push_back(h->right);
            h = h->left;
        }
        std::reverse(args.begin(), args.end());
        if (h->kind == Term::Kind::Var) {
            // head-variable spine with disjoint copies, merged back at the end
            std::vector<DerivPtr> argds;
            argds.reserve(args.size());
            for (const auto& a : args) argds.push_back(make_copy(go(a)));
            TypePtr ty = mk_tyvar(fresh_tyvar_name());
            for (auto it = argds.rbegin(); it != argds.rend(); ++it)
                ty = mk_arrow((*it)->conclusion.type, ty);
            DerivPtr cur = d_ax(fresh_name(), ty);
            for (const auto& ad : argds) cur = d_lolle(cur, ad);
            return rename_merge_to(cur, t);
        }
        return head_redex(h, args, t);
    }

    // t = (\x. P) N a_1 ... a_k; infer the reduct, then expand the head
    DerivPtr head_redex(const TermPtr& lam, const std::vector<TermPtr>& args,
                        const TermPtr& t) {
        const TermPtr& n_term = args[0];
        TermPtr reduct = substitute(lam->left, {{lam->name, n_term}});
        for (size_t i = 1; i < args.size(); ++i)
            reduct = mk_app(reduct, args[i]);
        DerivPtr psi = go(reduct);
        DerivPtr cur = psi;
        while (cur->rule == Rule::M) cur = cur->premises[0];
        std::vector<DerivPtr> argds;  // outermost first
        for (size_t i = args.size(); i > 1; --i) {
            if (cur->rule != Rule::LollE)
                throw DerivError("infer: unexpected shape at a spine node");
            argds.push_back(cur->premises[1]);
            cur = cur->premises[0];
        }
        DerivPtr expanded = expand_head(cur, lam->left, lam->name, n_term);
        for (auto it = argds.rbegin(); it != argds.rend(); ++it)
            expanded = d_lolle(expanded, *it);
        return rename_merge_to(expanded, t);
    }

    // -------- occurrence decomposition helpers

    // Splits Q (an instance of P[N/x]) at the free occurrences of x in P:
    // returns m with a fresh variable per occurrence, plus the subterms.
    std::pair<TermPtr, Bindings> extract_occurrences(const TermPtr& pat,
                                                     const std::string& x,
                                                     const TermPtr& s) {
        Bindings binds;
        std::function<TermPtr(const TermPtr&, const TermPtr&, bool)> walk =
            [&](const TermPtr& p, const TermPtr& q, bool shadowed) -> TermPtr {
            if (p->kind == Term::Kind::Var) {
                if (!shadowed && p->name == x) {
                    std::string xh = fresh_name();
                    binds.push_back({xh, q});
                    return mk_var(xh);
                }
                if (q->kind != Term::Kind::Var)
                    throw DerivError("inference: subject decomposition mismatch");
                return q;
            }
            if (p->kind != q->kind)
                throw DerivError("inference: subject decomposition mismatch");
            if (p->kind == Term::Kind::Abs)
                return mk_abs(q->name, walk(p->left, q->left,
                                            shadowed || p->name == x));
            return mk_app(walk(p->left, q->left, shadowed),
                          walk(p->right, q->right, shadowed));
        };
        TermPtr mhat = walk(pat, s, false);
        return {mhat, binds};
    }

    // Re-expresses (m, bindings) against a premise subject s: binding
    // variables keep their place, everything else adopts s's names.
    std::pair<TermPtr, Bindings> remap_bindings(const TermPtr& m,
                                                const TermPtr& s,
                                                const Bindings& binds) {
        std::map<std::string, TermPtr> found;
        std::set<std::string> bset;
        for (const auto& [v, nv] : binds) bset.insert(v);
        std::function<TermPtr(const TermPtr&, const TermPtr&)> walk =
            [&](const TermPtr& p, const TermPtr& q) -> TermPtr {
            if (p->kind == Term::Kind::Var && bset.count(p->name)) {
                found[p->name] = q;
                return p;
            }
            if (p->kind != q->kind)
                throw DerivError("inference: subject decomposition mismatch");
            switch (p->kind) {
                case Term::Kind::Var:
                    return q;
                case Term::Kind::Abs:
                    return mk_abs(q->name, walk(p->left, q->left));
                case Term::Kind::App:
                    return mk_app(walk(p->left, q->left),
                                  walk(p->right, q->right));
            }
            throw DerivError("inference: unknown term kind");
        };
        TermPtr m2 = walk(m, s);
        Bindings out;
        for (const auto& [v, nv] : binds) {
            auto it = found.find(v);
            if (it == found.end())
                throw DerivError("inference: binding variable lost");
            out.push_back({v, it->second});
        }
        return {m2, out};
    }

    // -------- inverse substitution; every binding occurs exactly once in m

    struct IRes {
        std::map<std::string, DerivPtr> sigmas;
        DerivPtr pi;
    };

    IRes invsub(const DerivPtr& pi, const TermPtr& m, const Bindings& binds) {
        spend();
        if (binds.empty()) return {{}, pi};
        if (pi->rule == Rule::W) {
            // weakened variables stay on the m side, even when the whole
            // subject is one substituted occurrence
            IRes r = invsub(pi->premises[0], m, binds);
            r.pi = d_w(r.pi, pi->meta.var, pi->meta.lintype);
            return r;
        }
        if (m->kind == Term::Kind::Var) {
            // the whole subject is one substituted occurrence
            if (binds.size() != 1 || binds[0].first != m->name ||
                !alpha_eq(pi->conclusion.subject, binds[0].second))
                throw DerivError("invert_substitution: decomposition mismatch");
            return {{{m->name, pi}}, var_typing(m->name, pi->conclusion.type)};
        }
        switch (pi->rule) {
            case Rule::Ax:
            case Rule::W:
                throw DerivError("invert_substitution: decomposition mismatch");
            case Rule::LollI: {
                if (m->kind != Term::Kind::Abs)
                    throw DerivError("invert_substitution: decomposition mismatch");
                TermPtr body = m->left;
                if (m->name != pi->meta.var) {
                    if (free_vars(body).count(pi->meta.var))
                        throw DerivError("invert_substitution: binder mismatch");
                    body = rename_free(body, {{m->name, pi->meta.var}});
                }
                IRes r = invsub(pi->premises[0], body, binds);
                r.pi = d_lolli(r.pi, pi->meta.var);
                return r;
            }
            case Rule::LollE: {
                if (m->kind != Term::Kind::App)
                    throw DerivError("invert_substitution: decomposition mismatch");
                auto lf = free_vars(m->left);
                auto rf = free_vars(m->right);
                Bindings bl, br;
                for (const auto& b : binds) {
                    if (lf.count(b.first))
                        bl.push_back(b);
                    else if (rf.count(b.first))
                        br.push_back(b);
                    else
                        throw DerivError("invert_substitution: binding unused");
                }
                IRes r0 = invsub(pi->premises[0], m->left, bl);
                IRes r1 = invsub(pi->premises[1], m->right, br);
                IRes out;
                out.pi = d_lolle(r0.pi, r1.pi);
                out.sigmas = std::move(r0.sigmas);
                out.sigmas.insert(r1.sigmas.begin(), r1.sigmas.end());
                return out;
            }
            case Rule::M: {
                auto [m2, binds2] =
                    remap_bindings(m, pi->premises[0]->conclusion.subject, binds);
                IRes r = invsub(pi->premises[0], m2, binds2);
                // the contracted variables resurface on whichever side of the
                // split they ended up
                std::vector<std::string> mine;
                for (const auto& yj : pi->meta.domain_vars)
                    if (r.pi->conclusion.ctx.count(yj)) mine.push_back(yj);
                if (!mine.empty()) r.pi = d_m(r.pi, mine, pi->meta.range_var);
                for (auto& [xv, sd] : r.sigmas) {
                    std::vector<std::string> theirs;
                    for (const auto& yj : pi->meta.domain_vars)
                        if (sd->conclusion.ctx.count(yj)) theirs.push_back(yj);
                    if (!theirs.empty())
                        sd = d_m(sd, theirs, pi->meta.range_var);
                }
                return r;
            }
            case Rule::St: {
                std::vector<DerivPtr> pims;
                std::map<std::string, std::vector<DerivPtr>> comps;
                for (const auto& prem : pi->premises) {
                    auto [mj, bj] =
                        remap_bindings(m, prem->conclusion.subject, binds);
                    IRes rj = invsub(prem, mj, bj);
                    pims.push_back(rj.pi);
                    for (const auto& [xv, sd] : rj.sigmas)
                        comps[xv].push_back(sd);
                }
                IRes out;
                out.pi = d_st(std::move(pims));
                for (auto& [xv, cs] : comps) out.sigmas[xv] = d_st(std::move(cs));
                return out;
            }
            case Rule::ForallI: {
                IRes r = invsub(pi->premises[0], m, binds);
                r.pi = d_foralli(r.pi, pi->meta.tyvar);
                return r;
            }
            case Rule::ForallE: {
                IRes r = invsub(pi->premises[0], m, binds);
                r.pi = d_foralle(r.pi, pi->meta.instantiated_with);
                return r;
            }
        }
        throw DerivError("invert_substitution: unknown rule");
    }

    // -------- head expansion: base proves an instance of P[N/x]

    DerivPtr expand_head(const DerivPtr& base, const TermPtr& P,
                         const std::string& x, const TermPtr& N) {
        auto [mhat, binds] =
            extract_occurrences(P, x, base->conclusion.subject);
        if (binds.empty()) {
            // vacuous binder: type N independently and weaken
            DerivPtr nd = make_copy(linearize(go(N)));
            std::string xh = fresh_name();
            DerivPtr lam = d_lolli(d_w(base, xh, nd->conclusion.type), xh);
            return d_lolle(lam, nd);
        }
        IRes r = invsub(base, mhat, binds);
        std::vector<std::string> xs;
        std::vector<DerivPtr> comps;
        for (const auto& [xv, nv] : binds) {
            xs.push_back(xv);
            comps.push_back(rename_merge_to(r.sigmas.at(xv), N));
        }
        std::string xh = fresh_name();
        DerivPtr lam = d_lolli(d_m(r.pi, xs, xh), xh);
        DerivPtr argd = make_copy(d_st(std::move(comps)));
        return d_lolle(lam, argd);
    }

    // -------- subject expansion at an arbitrary (possibly stratified) type

    DerivPtr expand(const DerivPtr& theta, const TermPtr& m,
                    const std::string& x, const TermPtr& n) {
        spend();
        if (is_linear(theta->conclusion.type)) {
            DerivPtr out = expand_head(theta, m, x, n);
            return rename_merge_to(out, mk_app(mk_abs(x, m), n));
        }
        StratSplit split = stratified_premises(theta);
        std::vector<DerivPtr> comps;
        comps.reserve(split.premises.size());
        for (const auto& p : split.premises)
            comps.push_back(expand(apply_suffix(p, split.suffix), m, x, n));
        return d_st(std::move(comps));
    }
};

}  // namespace

// ------------------------------------------------------------- public api

InferResult infer_sn(const TermPtr& m, long fuel) {
    Infer inf{fuel};
    try {
        return {inf.go(m), ""};
    } catch (const FuelExhausted&) {
        return {nullptr, "fuel"};
    }
}

InferResult infer_linear(const TermPtr& m, long fuel) {
    Infer inf{fuel};
    try {
        return {inf.linearize(inf.go(m)), ""};
    } catch (const FuelExhausted&) {
        return {nullptr, "fuel"};
    }
}

InvSubResult invert_substitution(const DerivPtr& pi, const TermPtr& m,
                                 const Bindings& bindings, long fuel) {
    Infer inf{fuel};
    std::set<std::string> bset;
    for (const auto& [v, nv] : bindings) {
        if (!bset.insert(v).second)
            throw DerivError("invert_substitution: duplicate binding variable");
    }
    // split multiple occurrences apart, aligned against pi's subject
    std::map<std::string, std::vector<std::string>> occs;  // var -> fresh names
    Bindings split;
    std::function<TermPtr(const TermPtr&, const TermPtr&,
                          std::vector<std::string>&)>
        walk = [&](const TermPtr& p, const TermPtr& q,
                   std::vector<std::string>& shadow) -> TermPtr {
        if (p->kind == Term::Kind::Var && bset.count(p->name) &&
            std::find(shadow.begin(), shadow.end(), p->name) == shadow.end()) {
            std::string xh = fresh_name();
            occs[p->name].push_back(xh);
            split.push_back({xh, q});
            return mk_var(xh);
        }
        if (p->kind != q->kind)
            throw DerivError("invert_substitution: subject mismatch");
        switch (p->kind) {
            case Term::Kind::Var:
                return q;
            case Term::Kind::Abs: {
                shadow.push_back(p->name);
                TermPtr body = walk(p->left, q->left, shadow);
                shadow.pop_back();
                return mk_abs(q->name, body);
            }
            case Term::Kind::App:
                return mk_app(walk(p->left, q->left, shadow),
                              walk(p->right, q->right, shadow));
        }
        throw DerivError("invert_substitution: unknown term kind");
    };
    std::vector<std::string> shadow;
    TermPtr mhat = walk(m, pi->conclusion.subject, shadow);
    // the replaced subterms must really be the claimed N_i
    for (const auto& [xh, sub] : split) {
        for (const auto& [v, nv] : bindings) {
            for (const auto& name : occs[v])
                if (name == xh && !alpha_eq(sub, nv))
                    throw DerivError(
                        "invert_substitution: subject does not match the "
                        "bindings");
        }
    }
    Infer::IRes r = inf.invsub(pi, mhat, split);

    InvSubResult out;
    for (const auto& [v, nv] : bindings) {
        const auto& names = occs[v];
        if (names.empty()) {
            // the variable does not occur: type N independently and weaken
            DerivPtr nd = inf.linearize(inf.go(nv));
            r.pi = d_w(r.pi, v, nd->conclusion.type);
            out.sigmas.push_back(nd);
        } else if (names.size() == 1) {
            r.pi = rename_free_deriv(r.pi, {{names[0], v}});
            out.sigmas.push_back(r.sigmas.at(names[0]));
        } else {
            // one singleton stratification per occurrence, then one contraction
            std::vector<std::string> wrapped;
            std::vector<DerivPtr> comps;
            for (const auto& name : names) {
                std::string w = fresh_name();
                r.pi = d_m(r.pi, {name}, w);
                wrapped.push_back(w);
                comps.push_back(d_st({r.sigmas.at(name)}));
            }
            r.pi = d_m(r.pi, wrapped, v);
            out.sigmas.push_back(d_st(std::move(comps)));
        }
    }
    out.pi = r.pi;
    return out;
}

DerivPtr subject_expand(const DerivPtr& theta, const TermPtr& m,
                        const std::string& x, const TermPtr& n, long fuel) {
    Infer inf{fuel};
    return inf.expand(theta, m, x, n);
}

}  // namespace strw
