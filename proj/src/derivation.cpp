#include "strw/derivation.hpp"

#include <algorithm>
#include <functional>
#include <variant>

namespace strw {

std::string rule_name(Rule r) {
    switch (r) {
        case Rule::Ax: return "Ax";
        case Rule::W: return "W";
        case Rule::LollI: return "LollI";
        case Rule::LollE: return "LollE";
        case Rule::M: return "M";
        case Rule::St: return "St";
        case Rule::ForallI: return "ForallI";
        case Rule::ForallE: return "ForallE";
    }
    return "?";
}

std::optional<Rule> rule_from_name(std::string_view s) {
    static const std::pair<std::string_view, Rule> table[] = {
        {"Ax", Rule::Ax},         {"W", Rule::W},
        {"LollI", Rule::LollI},   {"LollE", Rule::LollE},
        {"M", Rule::M},           {"St", Rule::St},
        {"ForallI", Rule::ForallI}, {"ForallE", Rule::ForallE},
    };
    for (const auto& [name, r] : table)
        if (name == s) return r;
    return std::nullopt;
}

DerivPtr mk_node(Rule rule, Judgment conclusion, Meta meta,
                 std::vector<DerivPtr> premises) {
    auto d = std::make_shared<Derivation>();
    d->rule = rule;
    d->conclusion = std::move(conclusion);
    d->meta = std::move(meta);
    d->premises = std::move(premises);
    return d;
}

// ------------------------------------------------------------- validation

namespace {

TypePtr as_arrow(const TypePtr& t) {
    TypePtr c = canonicalize(t);
    return c->kind == StratType::Kind::Arrow ? c : nullptr;
}

TypePtr as_forall(const TypePtr& t) {
    TypePtr c = canonicalize(t);
    return c->kind == StratType::Kind::Forall ? c : nullptr;
}

bool ctx_disjoint(const TypeContext& a, const TypeContext& b) {
    for (const auto& [x, _] : a)
        if (b.count(x)) return false;
    return true;
}

// Computes the conclusion a rule application yields, or a reason code.
std::variant<Judgment, std::string> derive_conclusion(
    Rule rule, const Meta& meta, const std::vector<DerivPtr>& prems) {
    switch (rule) {
        case Rule::Ax: {
            if (!prems.empty()) return std::string("bad-arity");
            if (meta.var.empty()) return std::string("missing-meta");
            if (!meta.lintype || !is_linear(meta.lintype))
                return std::string("axiom-not-linear");
            return Judgment{{{meta.var, meta.lintype}}, mk_var(meta.var),
                            meta.lintype};
        }
        case Rule::W: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (meta.var.empty()) return std::string("missing-meta");
            if (!meta.lintype || !is_linear(meta.lintype))
                return std::string("weakening-not-linear");
            const Judgment& p = prems[0]->conclusion;
            if (p.ctx.count(meta.var)) return std::string("weakening-var-present");
            TypeContext ctx = p.ctx;
            ctx[meta.var] = meta.lintype;
            return Judgment{std::move(ctx), p.subject, p.type};
        }
        case Rule::LollI: {
            if (prems.size() != 1) return std::string("bad-arity");
            const Judgment& p = prems[0]->conclusion;
            auto it = p.ctx.find(meta.var);
            if (it == p.ctx.end()) return std::string("abstraction-var-missing");
            if (!is_linear(p.type))
                return std::string("abstraction-result-not-linear");
            TypeContext ctx = p.ctx;
            TypePtr arg_ty = it->second;
            ctx.erase(meta.var);
            return Judgment{std::move(ctx), mk_abs(meta.var, p.subject),
                            mk_arrow(arg_ty, p.type)};
        }
        case Rule::LollE: {
            if (prems.size() != 2) return std::string("bad-arity");
            const Judgment& f = prems[0]->conclusion;
            const Judgment& a = prems[1]->conclusion;
            TypePtr arrow = as_arrow(f.type);
            if (!arrow) return std::string("application-not-arrow");
            if (!ctx_disjoint(f.ctx, a.ctx))
                return std::string("contexts-not-disjoint");
            if (!type_eq(arrow->arg, a.type))
                return std::string("argument-type-mismatch");
            TypeContext ctx = f.ctx;
            ctx.insert(a.ctx.begin(), a.ctx.end());
            return Judgment{std::move(ctx), mk_app(f.subject, a.subject),
                            arrow->res};
        }
        case Rule::M: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (meta.domain_vars.empty() || meta.range_var.empty())
                return std::string("multiplexor-domain-invalid");
            std::set<std::string> domain(meta.domain_vars.begin(),
                                         meta.domain_vars.end());
            if (domain.size() != meta.domain_vars.size())
                return std::string("multiplexor-domain-invalid");
            const Judgment& p = prems[0]->conclusion;
            std::vector<TypePtr> singletons;
            for (const auto& x : meta.domain_vars) {
                auto it = p.ctx.find(x);
                if (it == p.ctx.end()) return std::string("multiplexor-var-missing");
                singletons.push_back(it->second);
            }
            TypeContext ctx = p.ctx;
            for (const auto& x : meta.domain_vars) ctx.erase(x);
            if (ctx.count(meta.range_var))
                return std::string("multiplexor-target-clash");
            ctx[meta.range_var] = union_strat(singletons);
            std::map<std::string, std::string> ren;
            for (const auto& x : meta.domain_vars) ren[x] = meta.range_var;
            return Judgment{std::move(ctx), rename_free(p.subject, ren), p.type};
        }
        case Rule::St: {
            if (prems.empty()) return std::string("bad-arity");
            const Judgment& first = prems[0]->conclusion;
            std::vector<TypeContext> ctxs;
            std::vector<TypePtr> types;
            for (const auto& pr : prems) {
                if (!alpha_eq(pr->conclusion.subject, first.subject))
                    return std::string("stratification-subject-mismatch");
                ctxs.push_back(pr->conclusion.ctx);
                types.push_back(pr->conclusion.type);
            }
            TypeContext ctx;
            try {
                ctx = context_union(ctxs);
            } catch (const std::invalid_argument&) {
                return std::string("contexts-not-compatible");
            }
            return Judgment{std::move(ctx), first.subject, union_strat(types)};
        }
        case Rule::ForallI: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (meta.tyvar.empty()) return std::string("missing-meta");
            const Judgment& p = prems[0]->conclusion;
            if (!is_linear(p.type)) return std::string("quantifier-over-set");
            if (free_tyvars(p.ctx).count(meta.tyvar))
                return std::string("quantifier-var-free-in-context");
            return Judgment{p.ctx, p.subject, mk_forall(meta.tyvar, p.type)};
        }
        case Rule::ForallE: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (!meta.instantiated_with || !is_linear(meta.instantiated_with))
                return std::string("instantiation-not-linear");
            const Judgment& p = prems[0]->conclusion;
            TypePtr fa = as_forall(p.type);
            if (!fa) return std::string("instantiation-not-forall");
            return Judgment{p.ctx, p.subject,
                            subst_tyvar(fa->res, fa->name, meta.instantiated_with)};
        }
    }
    return std::string("unknown-rule");
}

DerivPtr build(Rule rule, Meta meta, std::vector<DerivPtr> prems) {
    auto result = derive_conclusion(rule, meta, prems);
    if (auto* reason = std::get_if<std::string>(&result))
        throw DerivError(rule_name(rule) + ": " + *reason);
    return mk_node(rule, std::get<Judgment>(std::move(result)), std::move(meta),
                   std::move(prems));
}

}  // namespace

DerivPtr d_ax(const std::string& x, TypePtr a) {
    Meta m;
    m.var = x;
    m.lintype = std::move(a);
    return build(Rule::Ax, std::move(m), {});
}

DerivPtr d_w(DerivPtr prem, const std::string& x, TypePtr a) {
    Meta m;
    m.var = x;
    m.lintype = std::move(a);
    return build(Rule::W, std::move(m), {std::move(prem)});
}

DerivPtr d_lolli(DerivPtr prem, const std::string& x) {
    Meta m;
    m.var = x;
    return build(Rule::LollI, std::move(m), {std::move(prem)});
}

DerivPtr d_lolle(DerivPtr fun, DerivPtr arg) {
    return build(Rule::LollE, Meta{}, {std::move(fun), std::move(arg)});
}

DerivPtr d_m(DerivPtr prem, std::vector<std::string> domain_vars,
             const std::string& range_var) {
    Meta m;
    m.domain_vars = std::move(domain_vars);
    m.range_var = range_var;
    return build(Rule::M, std::move(m), {std::move(prem)});
}

DerivPtr d_st(std::vector<DerivPtr> prems) {
    return build(Rule::St, Meta{}, std::move(prems));
}

DerivPtr d_foralli(DerivPtr prem, const std::string& a) {
    Meta m;
    m.tyvar = a;
    return build(Rule::ForallI, std::move(m), {std::move(prem)});
}

DerivPtr d_foralle(DerivPtr prem, TypePtr instantiated_with) {
    Meta m;
    m.instantiated_with = std::move(instantiated_with);
    if (TypePtr fa = as_forall(prem->conclusion.type)) m.tyvar = fa->name;
    return build(Rule::ForallE, std::move(m), {std::move(prem)});
}

// ------------------------------------------------------------------ check

namespace {

bool ctx_eq(const TypeContext& a, const TypeContext& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [x, ty] : a) {
        auto it = b.find(x);
        if (it == b.end() || !type_eq(ty, it->second)) return false;
    }
    return true;
}

std::optional<Violation> check_rec(const DerivPtr& d, std::vector<int>& path) {
    auto result = derive_conclusion(d->rule, d->meta, d->premises);
    if (auto* reason = std::get_if<std::string>(&result))
        return Violation{path, *reason};
    const Judgment& j = std::get<Judgment>(result);
    if (!ctx_eq(j.ctx, d->conclusion.ctx))
        return Violation{path, "conclusion-context-mismatch"};
    if (!alpha_eq(j.subject, d->conclusion.subject))
        return Violation{path, "conclusion-subject-mismatch"};
    if (!type_eq(j.type, d->conclusion.type))
        return Violation{path, "conclusion-type-mismatch"};
    for (size_t i = 0; i < d->premises.size(); ++i) {
        path.push_back(static_cast<int>(i));
        if (auto v = check_rec(d->premises[i], path)) return v;
        path.pop_back();
    }
    return std::nullopt;
}

}  // namespace

std::optional<Violation> check(const DerivPtr& d) {
    std::vector<int> path;
    return check_rec(d, path);
}

// --------------------------------------------------------------- measures

namespace {

long degree_rec(const DerivPtr& d, std::map<const Derivation*, long>& memo) {
    if (auto it = memo.find(d.get()); it != memo.end()) return it->second;
    long best = 0;
    for (const auto& p : d->premises) best = std::max(best, degree_rec(p, memo));
    if (d->rule == Rule::St) best += 1;
    memo[d.get()] = best;
    return best;
}

void rank_rec(const DerivPtr& d, long& best,
              std::set<const Derivation*>& seen) {
    if (!seen.insert(d.get()).second) return;
    if (d->rule == Rule::M) {
        auto fv = free_vars(d->premises[0]->conclusion.subject);
        long count = 0;
        for (const auto& x : d->meta.domain_vars)
            if (fv.count(x)) ++count;
        best = std::max(best, count);
    }
    for (const auto& p : d->premises) rank_rec(p, best, seen);
}

BigInt weight_rec(const DerivPtr& d, unsigned long r,
                  std::map<const Derivation*, BigInt>& memo) {
    if (auto it = memo.find(d.get()); it != memo.end()) return it->second;
    BigInt w;
    switch (d->rule) {
        case Rule::Ax:
            w = 1;
            break;
        case Rule::LollI:
            w = weight_rec(d->premises[0], r, memo) + 1;
            break;
        case Rule::LollE:
            w = weight_rec(d->premises[0], r, memo) +
                weight_rec(d->premises[1], r, memo) + 1;
            break;
        case Rule::St: {
            BigInt mx = 0;
            for (const auto& p : d->premises)
                mx = std::max(mx, weight_rec(p, r, memo));
            w = BigInt(r) * mx;
            break;
        }
        default:
            w = weight_rec(d->premises[0], r, memo);
            break;
    }
    memo[d.get()] = w;
    return w;
}

}  // namespace

BigInt weight_at(const DerivPtr& d, unsigned long r) {
    std::map<const Derivation*, BigInt> memo;
    return weight_rec(d, r, memo);
}

long rank_of(const DerivPtr& d) {
    long best = 1;
    std::set<const Derivation*> seen;
    rank_rec(d, best, seen);
    return best;
}

long degree_of(const DerivPtr& d) {
    std::map<const Derivation*, long> memo;
    return degree_rec(d, memo);
}

BigInt Measures::weight_at(unsigned long r) const {
    return strw::weight_at(deriv, r);
}

Measures measures(const DerivPtr& d) {
    if (auto v = check(d))
        throw DerivError("measures: invalid derivation (" + v->reason + ")");
    Measures m;
    m.deriv = d;
    m.subject_size = term_size(d->conclusion.subject);
    std::map<const Derivation*, long> dmemo;
    m.degree = degree_rec(d, dmemo);
    long best = 1;
    std::set<const Derivation*> seen;
    rank_rec(d, best, seen);
    m.rank = best;
    return m;
}

// ------------------------------------------------------------- cleanliness

namespace {

void vars_rec(const DerivPtr& d, std::set<const Derivation*>& seen,
              std::set<std::string>& out) {
    if (!seen.insert(d.get()).second) return;
    for (const auto& [x, _] : d->conclusion.ctx) out.insert(x);
    if (!d->meta.var.empty()) out.insert(d->meta.var);
    if (!d->meta.range_var.empty()) out.insert(d->meta.range_var);
    for (const auto& x : d->meta.domain_vars) out.insert(x);
    for (const auto& p : d->premises) vars_rec(p, seen, out);
}

}  // namespace

std::set<std::string> derivation_vars(const DerivPtr& d) {
    std::set<const Derivation*> seen;
    std::set<std::string> out;
    vars_rec(d, seen, out);
    return out;
}

bool is_clean(const DerivPtr& d) {
    if (d->rule == Rule::LollE) {
        auto a = derivation_vars(d->premises[0]);
        auto b = derivation_vars(d->premises[1]);
        for (const auto& x : a)
            if (b.count(x)) return false;
    }
    for (const auto& p : d->premises)
        if (!is_clean(p)) return false;
    return true;
}

// --------------------------------------------------------------- renaming

namespace {

std::string apply_ren(const std::map<std::string, std::string>& ren,
                      const std::string& x) {
    auto it = ren.find(x);
    return it != ren.end() ? it->second : x;
}

// Rebuilds the derivation with free conclusion variables renamed by ren and
// every internally consumed variable (multiplexor domains, binders) made
// fresh. Structure and weights are untouched.
DerivPtr rename_deriv(const DerivPtr& d, std::map<std::string, std::string> ren) {
    switch (d->rule) {
        case Rule::Ax:
            return d_ax(apply_ren(ren, d->meta.var), d->meta.lintype);
        case Rule::W: {
            DerivPtr p = rename_deriv(d->premises[0], ren);
            return d_w(p, apply_ren(ren, d->meta.var), d->meta.lintype);
        }
        case Rule::LollI: {
            std::string nb = fresh_name();
            auto inner = ren;
            inner[d->meta.var] = nb;
            DerivPtr p = rename_deriv(d->premises[0], std::move(inner));
            return d_lolli(p, nb);
        }
        case Rule::LollE:
            return d_lolle(rename_deriv(d->premises[0], ren),
                           rename_deriv(d->premises[1], ren));
        case Rule::M: {
            auto inner = ren;
            std::vector<std::string> fresh_domain;
            for (const auto& x : d->meta.domain_vars) {
                std::string nx = fresh_name();
                fresh_domain.push_back(nx);
                inner[x] = nx;
            }
            DerivPtr p = rename_deriv(d->premises[0], std::move(inner));
            return d_m(p, std::move(fresh_domain), apply_ren(ren, d->meta.range_var));
        }
        case Rule::St: {
            std::vector<DerivPtr> ps;
            ps.reserve(d->premises.size());
            for (const auto& pr : d->premises) ps.push_back(rename_deriv(pr, ren));
            return d_st(std::move(ps));
        }
        case Rule::ForallI:
            return d_foralli(rename_deriv(d->premises[0], ren), d->meta.tyvar);
        case Rule::ForallE:
            return d_foralle(rename_deriv(d->premises[0], ren),
                             d->meta.instantiated_with);
    }
    throw DerivError("rename: unknown rule");
}

}  // namespace

DerivPtr make_copy(const DerivPtr& d, std::map<std::string, std::string>& renames_out) {
    renames_out.clear();
    for (const auto& [x, _] : d->conclusion.ctx) renames_out[x] = fresh_name();
    return rename_deriv(d, renames_out);
}

DerivPtr make_copy(const DerivPtr& d) {
    std::map<std::string, std::string> renames;
    return make_copy(d, renames);
}

DerivPtr freshen_internal(const DerivPtr& d) {
    return rename_deriv(d, {});
}

DerivPtr rename_free_deriv(const DerivPtr& d,
                           const std::map<std::string, std::string>& ren) {
    return rename_deriv(d, ren);
}

DerivPtr make_clean(const DerivPtr& d) {
    std::vector<DerivPtr> ps;
    ps.reserve(d->premises.size());
    bool changed = false;
    for (const auto& p : d->premises) {
        DerivPtr cp = make_clean(p);
        changed |= (cp != p);
        ps.push_back(std::move(cp));
    }
    if (d->rule == Rule::LollE) {
        auto a = derivation_vars(ps[0]);
        auto b = derivation_vars(ps[1]);
        bool overlap = false;
        for (const auto& x : a)
            if (b.count(x)) { overlap = true; break; }
        if (overlap) {
            // contexts are disjoint by validity, so the overlap is on
            // internal names only
            ps[0] = freshen_internal(ps[0]);
            ps[1] = freshen_internal(ps[1]);
            changed = true;
        }
    }
    if (!changed) return d;
    return mk_node(d->rule, d->conclusion, d->meta, std::move(ps));
}

DerivPtr make_instance(const DerivPtr& d, const Grouping& grouping) {
    DerivPtr cur = d;
    for (const auto& [xs, y] : grouping) cur = d_m(cur, xs, y);
    return cur;
}

// -------------------------------------------------- weakening and friends

DerivPtr weaken(const DerivPtr& d, const std::string& x, const TypePtr& tau) {
    if (d->conclusion.ctx.count(x))
        throw DerivError("weaken: variable already present: " + x);
    if (is_linear(tau)) return d_w(d, x, tau);
    TypePtr canon = canonicalize(tau);
    DerivPtr cur = d;
    std::vector<std::string> zs;
    for (const auto& comp : canon->comps) {
        std::string z = fresh_name();
        cur = weaken(cur, z, comp);
        zs.push_back(std::move(z));
    }
    return d_m(cur, std::move(zs), x);
}

DerivPtr var_typing(const std::string& x, const TypePtr& sigma) {
    if (is_linear(sigma)) return d_ax(x, sigma);
    TypePtr canon = canonicalize(sigma);
    std::vector<DerivPtr> prems;
    prems.reserve(canon->comps.size());
    for (const auto& comp : canon->comps) prems.push_back(var_typing(x, comp));
    return d_st(std::move(prems));
}

// ----------------------------------------------------------- decomposition

StratSplit stratified_premises(const DerivPtr& d) {
    if (is_linear(d->conclusion.type))
        throw DerivError("stratified_premises: conclusion type is linear");
    std::vector<DerivPtr> walk;
    DerivPtr cur = d;
    while (cur->rule == Rule::W || cur->rule == Rule::M) {
        walk.push_back(cur);
        cur = cur->premises[0];
    }
    if (cur->rule != Rule::St)
        throw DerivError("stratified_premises: no stratification below the suffix");
    StratSplit split;
    split.premises = cur->premises;
    split.suffix.assign(walk.rbegin(), walk.rend());
    return split;
}

DerivPtr apply_suffix(DerivPtr base, const std::vector<DerivPtr>& suffix) {
    DerivPtr cur = std::move(base);
    for (const auto& node : suffix) {
        switch (node->rule) {
            case Rule::W:
                cur = d_w(cur, node->meta.var, node->meta.lintype);
                break;
            case Rule::M:
                cur = d_m(cur, node->meta.domain_vars, node->meta.range_var);
                break;
            case Rule::ForallI:
                cur = d_foralli(cur, node->meta.tyvar);
                break;
            case Rule::ForallE:
                cur = d_foralle(cur, node->meta.instantiated_with);
                break;
            default:
                throw DerivError("apply_suffix: non-unary rule in suffix");
        }
    }
    return cur;
}

DerivPtr linear_component_typing(const DerivPtr& d, size_t i) {
    if (is_linear(d->conclusion.type)) {
        if (i != 0) throw DerivError("linear_component_typing: index out of range");
        return d;
    }
    TypePtr canon = canonicalize(d->conclusion.type);
    StratSplit split = stratified_premises(d);
    // map the flat component index onto one of the distinct set components
    size_t offset = i;
    for (const auto& comp : canon->comps) {
        size_t span = linear_components(comp).size();
        if (offset < span) {
            for (const auto& p : split.premises) {
                if (type_eq(p->conclusion.type, comp)) {
                    DerivPtr lifted = apply_suffix(p, split.suffix);
                    return linear_component_typing(lifted, offset);
                }
            }
            throw DerivError("linear_component_typing: component not found");
        }
        offset -= span;
    }
    throw DerivError("linear_component_typing: index out of range");
}

// -------------------------------------------------------------- ancestors

std::set<std::string> ancestors(const std::string& x, const DerivPtr& d) {
    if (!d->conclusion.ctx.count(x))
        throw DerivError("ancestors: variable not in context: " + x);
    switch (d->rule) {
        case Rule::Ax:
            return {x};
        case Rule::W:
            if (d->meta.var == x) return {x};
            return ancestors(x, d->premises[0]);
        case Rule::M: {
            if (d->meta.range_var == x) {
                std::set<std::string> out;
                for (const auto& y : d->meta.domain_vars) {
                    auto sub = ancestors(y, d->premises[0]);
                    out.insert(sub.begin(), sub.end());
                }
                return out;
            }
            return ancestors(x, d->premises[0]);
        }
        case Rule::St: {
            std::set<std::string> out;
            for (const auto& p : d->premises) {
                auto sub = ancestors(x, p);
                out.insert(sub.begin(), sub.end());
            }
            return out;
        }
        case Rule::LollE:
            if (d->premises[0]->conclusion.ctx.count(x))
                return ancestors(x, d->premises[0]);
            return ancestors(x, d->premises[1]);
        case Rule::LollI:
        case Rule::ForallI:
        case Rule::ForallE:
            return ancestors(x, d->premises[0]);
    }
    throw DerivError("ancestors: unknown rule");
}

}  // namespace strw
