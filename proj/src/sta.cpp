#include "strw/sta.hpp"

#include <variant>

namespace strw {

// ------------------------------------------------------------------ types

StaTypePtr mk_sta_tyvar(std::string name) {
    auto t = std::make_shared<StaType>();
    t->kind = StaType::Kind::TyVar;
    t->name = std::move(name);
    return t;
}

StaTypePtr mk_sta_arrow(StaTypePtr arg, StaTypePtr res) {
    if (!is_sta_linear(res))
        throw TypeParseError("arrow result must be linear");
    auto t = std::make_shared<StaType>();
    t->kind = StaType::Kind::Arrow;
    t->arg = std::move(arg);
    t->res = std::move(res);
    return t;
}

StaTypePtr mk_sta_forall(std::string var, StaTypePtr body) {
    if (!is_sta_linear(body))
        throw TypeParseError("quantifier body must be linear");
    auto t = std::make_shared<StaType>();
    t->kind = StaType::Kind::Forall;
    t->name = std::move(var);
    t->res = std::move(body);
    return t;
}

StaTypePtr mk_sta_bang(StaTypePtr inner) {
    auto t = std::make_shared<StaType>();
    t->kind = StaType::Kind::Bang;
    t->arg = std::move(inner);
    return t;
}

bool is_sta_linear(const StaTypePtr& t) {
    return t->kind != StaType::Kind::Bang;
}

namespace {

struct StaTypeParser {
    std::string_view src;
    size_t pos = 0;

    void skip() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eat(std::string_view s) {
        skip();
        if (src.substr(pos, s.size()) != s) return false;
        pos += s.size();
        return true;
    }
    std::string ident() {
        skip();
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_' || src[pos] == '\''))
            ++pos;
        if (start == pos) throw TypeParseError("expected identifier");
        return std::string(src.substr(start, pos - start));
    }

    StaTypePtr mu() {
        StaTypePtr lhs = item();
        skip();
        if (eat("-o")) return mk_sta_arrow(lhs, linear(mu()));
        return lhs;
    }

    StaTypePtr linear(StaTypePtr t) {
        if (!is_sta_linear(t))
            throw TypeParseError("expected a linear type");
        return t;
    }

    StaTypePtr item() {
        skip();
        if (eat("!")) return mk_sta_bang(item());
        if (eat("(")) {
            StaTypePtr t = mu();
            if (!eat(")")) throw TypeParseError("expected )");
            return t;
        }
        std::string id = ident();
        if (id == "forall") {
            std::string a = ident();
            if (!eat(".")) throw TypeParseError("expected . after forall");
            return mk_sta_forall(a, linear(mu()));
        }
        return mk_sta_tyvar(std::move(id));
    }
};

}  // namespace

StaTypePtr parse_sta_type(std::string_view text) {
    StaTypeParser p{text};
    StaTypePtr t = p.mu();
    p.skip();
    if (p.pos != text.size()) throw TypeParseError("trailing input");
    return t;
}

std::string print_sta_type(const StaTypePtr& t) {
    switch (t->kind) {
        case StaType::Kind::TyVar:
            return t->name;
        case StaType::Kind::Bang: {
            std::string inner = print_sta_type(t->arg);
            if (t->arg->kind == StaType::Kind::TyVar ||
                t->arg->kind == StaType::Kind::Bang)
                return "!" + inner;
            return "!(" + inner + ")";
        }
        case StaType::Kind::Arrow: {
            std::string lhs = print_sta_type(t->arg);
            if (t->arg->kind == StaType::Kind::Arrow ||
                t->arg->kind == StaType::Kind::Forall)
                lhs = "(" + lhs + ")";
            return lhs + " -o " + print_sta_type(t->res);
        }
        case StaType::Kind::Forall:
            return "forall " + t->name + ". " + print_sta_type(t->res);
    }
    return "?";
}

namespace {

bool eq_rec(const StaTypePtr& a, const StaTypePtr& b,
            std::vector<std::pair<std::string, std::string>>& env) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case StaType::Kind::TyVar: {
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                if (it->first == a->name) return it->second == b->name;
                if (it->second == b->name) return false;
            }
            return a->name == b->name;
        }
        case StaType::Kind::Bang:
            return eq_rec(a->arg, b->arg, env);
        case StaType::Kind::Arrow:
            return eq_rec(a->arg, b->arg, env) && eq_rec(a->res, b->res, env);
        case StaType::Kind::Forall: {
            env.push_back({a->name, b->name});
            bool ok = eq_rec(a->res, b->res, env);
            env.pop_back();
            return ok;
        }
    }
    return false;
}

}  // namespace

bool sta_type_eq(const StaTypePtr& a, const StaTypePtr& b) {
    std::vector<std::pair<std::string, std::string>> env;
    return eq_rec(a, b, env);
}

std::set<std::string> sta_free_tyvars(const StaTypePtr& t) {
    switch (t->kind) {
        case StaType::Kind::TyVar:
            return {t->name};
        case StaType::Kind::Bang:
            return sta_free_tyvars(t->arg);
        case StaType::Kind::Arrow: {
            auto s = sta_free_tyvars(t->arg);
            auto r = sta_free_tyvars(t->res);
            s.insert(r.begin(), r.end());
            return s;
        }
        case StaType::Kind::Forall: {
            auto s = sta_free_tyvars(t->res);
            s.erase(t->name);
            return s;
        }
    }
    return {};
}

StaTypePtr sta_subst_tyvar(const StaTypePtr& t, const std::string& a,
                           const StaTypePtr& b) {
    switch (t->kind) {
        case StaType::Kind::TyVar:
            return t->name == a ? b : t;
        case StaType::Kind::Bang:
            return mk_sta_bang(sta_subst_tyvar(t->arg, a, b));
        case StaType::Kind::Arrow:
            return mk_sta_arrow(sta_subst_tyvar(t->arg, a, b),
                                sta_subst_tyvar(t->res, a, b));
        case StaType::Kind::Forall: {
            if (t->name == a) return t;
            if (sta_free_tyvars(b).count(t->name)) {
                std::string c = fresh_tyvar_name();
                StaTypePtr body =
                    sta_subst_tyvar(t->res, t->name, mk_sta_tyvar(c));
                return mk_sta_forall(c, sta_subst_tyvar(body, a, b));
            }
            return mk_sta_forall(t->name, sta_subst_tyvar(t->res, a, b));
        }
    }
    return t;
}

// ------------------------------------------------------------ derivations

std::string sta_rule_name(StaRule r) {
    switch (r) {
        case StaRule::Ax: return "Ax";
        case StaRule::W: return "W";
        case StaRule::LollI: return "LollI";
        case StaRule::LollE: return "LollE";
        case StaRule::M: return "M";
        case StaRule::Sp: return "Sp";
        case StaRule::ForallI: return "ForallI";
        case StaRule::ForallE: return "ForallE";
    }
    return "?";
}

std::optional<StaRule> sta_rule_from_name(std::string_view s) {
    static const std::map<std::string_view, StaRule> table = {
        {"Ax", StaRule::Ax},         {"W", StaRule::W},
        {"LollI", StaRule::LollI},   {"LollE", StaRule::LollE},
        {"M", StaRule::M},           {"Sp", StaRule::Sp},
        {"ForallI", StaRule::ForallI}, {"ForallE", StaRule::ForallE},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

StaDerivPtr mk_sta_node(StaRule rule, StaJudgment conclusion, StaMeta meta,
                        std::vector<StaDerivPtr> premises) {
    auto d = std::make_shared<StaDerivation>();
    d->rule = rule;
    d->conclusion = std::move(conclusion);
    d->meta = std::move(meta);
    d->premises = std::move(premises);
    return d;
}

namespace {

bool sta_ctx_disjoint(const StaContext& a, const StaContext& b) {
    for (const auto& [x, _] : a)
        if (b.count(x)) return false;
    return true;
}

std::variant<StaJudgment, std::string> sta_derive_conclusion(
    StaRule rule, const StaMeta& meta, const std::vector<StaDerivPtr>& prems) {
    switch (rule) {
        case StaRule::Ax: {
            if (!prems.empty()) return std::string("bad-arity");
            if (meta.var.empty()) return std::string("missing-meta");
            if (!meta.lintype || !is_sta_linear(meta.lintype))
                return std::string("axiom-not-linear");
            return StaJudgment{{{meta.var, meta.lintype}}, mk_var(meta.var),
                               meta.lintype};
        }
        case StaRule::W: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (meta.var.empty()) return std::string("missing-meta");
            if (!meta.lintype || !is_sta_linear(meta.lintype))
                return std::string("weakening-not-linear");
            const StaJudgment& p = prems[0]->conclusion;
            if (p.ctx.count(meta.var))
                return std::string("weakening-var-present");
            StaContext ctx = p.ctx;
            ctx[meta.var] = meta.lintype;
            return StaJudgment{std::move(ctx), p.subject, p.type};
        }
        case StaRule::LollI: {
            if (prems.size() != 1) return std::string("bad-arity");
            const StaJudgment& p = prems[0]->conclusion;
            auto it = p.ctx.find(meta.var);
            if (it == p.ctx.end())
                return std::string("abstraction-var-missing");
            if (!is_sta_linear(p.type))
                return std::string("abstraction-result-not-linear");
            StaContext ctx = p.ctx;
            StaTypePtr arg_ty = it->second;
            ctx.erase(meta.var);
            return StaJudgment{std::move(ctx), mk_abs(meta.var, p.subject),
                               mk_sta_arrow(arg_ty, p.type)};
        }
        case StaRule::LollE: {
            if (prems.size() != 2) return std::string("bad-arity");
            const StaJudgment& f = prems[0]->conclusion;
            const StaJudgment& a = prems[1]->conclusion;
            if (f.type->kind != StaType::Kind::Arrow)
                return std::string("application-not-arrow");
            if (!sta_ctx_disjoint(f.ctx, a.ctx))
                return std::string("contexts-not-disjoint");
            if (!sta_type_eq(f.type->arg, a.type))
                return std::string("argument-type-mismatch");
            StaContext ctx = f.ctx;
            ctx.insert(a.ctx.begin(), a.ctx.end());
            return StaJudgment{std::move(ctx), mk_app(f.subject, a.subject),
                               f.type->res};
        }
        case StaRule::M: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (meta.domain_vars.empty() || meta.range_var.empty())
                return std::string("multiplexor-domain-invalid");
            std::set<std::string> domain(meta.domain_vars.begin(),
                                         meta.domain_vars.end());
            if (domain.size() != meta.domain_vars.size())
                return std::string("multiplexor-domain-invalid");
            const StaJudgment& p = prems[0]->conclusion;
            StaTypePtr mu;
            for (const auto& x : meta.domain_vars) {
                auto it = p.ctx.find(x);
                if (it == p.ctx.end())
                    return std::string("multiplexor-var-missing");
                if (!mu)
                    mu = it->second;
                else if (!sta_type_eq(mu, it->second))
                    return std::string("multiplexor-types-differ");
            }
            StaContext ctx = p.ctx;
            for (const auto& x : meta.domain_vars) ctx.erase(x);
            if (ctx.count(meta.range_var))
                return std::string("multiplexor-target-clash");
            ctx[meta.range_var] = mk_sta_bang(mu);
            std::map<std::string, std::string> ren;
            for (const auto& x : meta.domain_vars) ren[x] = meta.range_var;
            return StaJudgment{std::move(ctx), rename_free(p.subject, ren),
                               p.type};
        }
        case StaRule::Sp: {
            if (prems.size() != 1) return std::string("bad-arity");
            const StaJudgment& p = prems[0]->conclusion;
            StaContext ctx;
            for (const auto& [x, ty] : p.ctx) ctx[x] = mk_sta_bang(ty);
            return StaJudgment{std::move(ctx), p.subject,
                               mk_sta_bang(p.type)};
        }
        case StaRule::ForallI: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (meta.tyvar.empty()) return std::string("missing-meta");
            const StaJudgment& p = prems[0]->conclusion;
            if (!is_sta_linear(p.type))
                return std::string("quantifier-over-modal");
            for (const auto& [x, ty] : p.ctx)
                if (sta_free_tyvars(ty).count(meta.tyvar))
                    return std::string("quantifier-var-free-in-context");
            return StaJudgment{p.ctx, p.subject,
                               mk_sta_forall(meta.tyvar, p.type)};
        }
        case StaRule::ForallE: {
            if (prems.size() != 1) return std::string("bad-arity");
            if (!meta.instantiated_with ||
                !is_sta_linear(meta.instantiated_with))
                return std::string("instantiation-not-linear");
            const StaJudgment& p = prems[0]->conclusion;
            if (p.type->kind != StaType::Kind::Forall)
                return std::string("instantiation-not-forall");
            return StaJudgment{p.ctx, p.subject,
                               sta_subst_tyvar(p.type->res, p.type->name,
                                               meta.instantiated_with)};
        }
    }
    return std::string("unknown-rule");
}

StaDerivPtr sta_build(StaRule rule, StaMeta meta,
                      std::vector<StaDerivPtr> prems) {
    auto result = sta_derive_conclusion(rule, meta, prems);
    if (auto* reason = std::get_if<std::string>(&result))
        throw DerivError(sta_rule_name(rule) + ": " + *reason);
    return mk_sta_node(rule, std::get<StaJudgment>(std::move(result)),
                       std::move(meta), std::move(prems));
}

}  // namespace

StaDerivPtr sta_ax(const std::string& x, StaTypePtr u) {
    StaMeta m;
    m.var = x;
    m.lintype = std::move(u);
    return sta_build(StaRule::Ax, std::move(m), {});
}

StaDerivPtr sta_w(StaDerivPtr prem, const std::string& x, StaTypePtr u) {
    StaMeta m;
    m.var = x;
    m.lintype = std::move(u);
    return sta_build(StaRule::W, std::move(m), {std::move(prem)});
}

StaDerivPtr sta_lolli(StaDerivPtr prem, const std::string& x) {
    StaMeta m;
    m.var = x;
    return sta_build(StaRule::LollI, std::move(m), {std::move(prem)});
}

StaDerivPtr sta_lolle(StaDerivPtr fun, StaDerivPtr arg) {
    return sta_build(StaRule::LollE, {}, {std::move(fun), std::move(arg)});
}

StaDerivPtr sta_m(StaDerivPtr prem, std::vector<std::string> domain_vars,
                  const std::string& range_var) {
    StaMeta m;
    m.domain_vars = std::move(domain_vars);
    m.range_var = range_var;
    return sta_build(StaRule::M, std::move(m), {std::move(prem)});
}

StaDerivPtr sta_sp(StaDerivPtr prem) {
    return sta_build(StaRule::Sp, {}, {std::move(prem)});
}

StaDerivPtr sta_foralli(StaDerivPtr prem, const std::string& a) {
    StaMeta m;
    m.tyvar = a;
    return sta_build(StaRule::ForallI, std::move(m), {std::move(prem)});
}

StaDerivPtr sta_foralle(StaDerivPtr prem, StaTypePtr instantiated_with) {
    StaMeta m;
    m.instantiated_with = std::move(instantiated_with);
    return sta_build(StaRule::ForallE, std::move(m), {std::move(prem)});
}

namespace {

bool sta_ctx_eq(const StaContext& a, const StaContext& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [x, ty] : a) {
        auto it = b.find(x);
        if (it == b.end() || !sta_type_eq(ty, it->second)) return false;
    }
    return true;
}

std::optional<Violation> check_sta_rec(const StaDerivPtr& d,
                                       std::vector<int>& path) {
    auto result = sta_derive_conclusion(d->rule, d->meta, d->premises);
    if (auto* reason = std::get_if<std::string>(&result))
        return Violation{path, *reason};
    const StaJudgment& j = std::get<StaJudgment>(result);
    if (!sta_ctx_eq(j.ctx, d->conclusion.ctx))
        return Violation{path, "conclusion-context-mismatch"};
    if (!alpha_eq(j.subject, d->conclusion.subject))
        return Violation{path, "conclusion-subject-mismatch"};
    if (!sta_type_eq(j.type, d->conclusion.type))
        return Violation{path, "conclusion-type-mismatch"};
    for (size_t i = 0; i < d->premises.size(); ++i) {
        path.push_back(static_cast<int>(i));
        if (auto v = check_sta_rec(d->premises[i], path)) return v;
        path.pop_back();
    }
    return std::nullopt;
}

}  // namespace

std::optional<Violation> check_sta(const StaDerivPtr& d) {
    std::vector<int> path;
    return check_sta_rec(d, path);
}

// --------------------------------------------------------------- measures

namespace {

long sta_degree_rec(const StaDerivPtr& d) {
    long best = 0;
    for (const auto& p : d->premises)
        best = std::max(best, sta_degree_rec(p));
    if (d->rule == StaRule::Sp) best += 1;
    return best;
}

void sta_rank_rec(const StaDerivPtr& d, long& best) {
    if (d->rule == StaRule::M) {
        auto fv = free_vars(d->premises[0]->conclusion.subject);
        long count = 0;
        for (const auto& x : d->meta.domain_vars)
            if (fv.count(x)) ++count;
        best = std::max(best, count);
    }
    for (const auto& p : d->premises) sta_rank_rec(p, best);
}

BigInt sta_weight_rec(const StaDerivPtr& d, unsigned long r) {
    switch (d->rule) {
        case StaRule::Ax:
            return 1;
        case StaRule::LollI:
            return sta_weight_rec(d->premises[0], r) + 1;
        case StaRule::LollE:
            return sta_weight_rec(d->premises[0], r) +
                   sta_weight_rec(d->premises[1], r) + 1;
        case StaRule::Sp:
            return BigInt(r) * sta_weight_rec(d->premises[0], r);
        default:
            return sta_weight_rec(d->premises[0], r);
    }
}

}  // namespace

BigInt sta_weight_at(const StaDerivPtr& d, unsigned long r) {
    return sta_weight_rec(d, r);
}

BigInt StaMeasures::weight_at(unsigned long r) const {
    return sta_weight_rec(deriv, r);
}

StaMeasures sta_measures(const StaDerivPtr& d) {
    if (auto v = check_sta(d))
        throw DerivError("sta_measures: invalid derivation (" + v->reason +
                         ")");
    StaMeasures m;
    m.subject_size = term_size(d->conclusion.subject);
    m.rank = 1;
    sta_rank_rec(d, m.rank);
    m.degree = sta_degree_rec(d);
    m.deriv = d;
    return m;
}

// -------------------------------------------------------------- embedding

TypePtr translate_type(const StaTypePtr& t) {
    switch (t->kind) {
        case StaType::Kind::TyVar:
            return mk_tyvar(t->name);
        case StaType::Kind::Bang:
            return mk_strat({translate_type(t->arg)});
        case StaType::Kind::Arrow:
            return mk_arrow(translate_type(t->arg), translate_type(t->res));
        case StaType::Kind::Forall:
            return mk_forall(t->name, translate_type(t->res));
    }
    throw TypeParseError("translate_type: unknown kind");
}

DerivPtr translate_derivation(const StaDerivPtr& d) {
    switch (d->rule) {
        case StaRule::Ax:
            return d_ax(d->meta.var, translate_type(d->meta.lintype));
        case StaRule::W:
            return d_w(translate_derivation(d->premises[0]), d->meta.var,
                       translate_type(d->meta.lintype));
        case StaRule::LollI:
            return d_lolli(translate_derivation(d->premises[0]), d->meta.var);
        case StaRule::LollE:
            return d_lolle(translate_derivation(d->premises[0]),
                           translate_derivation(d->premises[1]));
        case StaRule::M:
            return d_m(translate_derivation(d->premises[0]),
                       d->meta.domain_vars, d->meta.range_var);
        case StaRule::Sp:
            return d_st({translate_derivation(d->premises[0])});
        case StaRule::ForallI:
            return d_foralli(translate_derivation(d->premises[0]),
                             d->meta.tyvar);
        case StaRule::ForallE:
            return d_foralle(translate_derivation(d->premises[0]),
                             translate_type(d->meta.instantiated_with));
    }
    throw DerivError("translate_derivation: unknown rule");
}

// ------------------------------------------------------------------- json

using nlohmann::json;

json sta_to_json(const StaDerivPtr& d) {
    json node;
    node["system"] = "STA";
    node["rule"] = sta_rule_name(d->rule);
    json ctx = json::array();
    for (const auto& [x, ty] : d->conclusion.ctx)
        ctx.push_back(json::array({x, print_sta_type(ty)}));
    node["ctx"] = std::move(ctx);
    node["term"] = print_term(d->conclusion.subject);
    node["type"] = print_sta_type(d->conclusion.type);
    json meta = json::object();
    switch (d->rule) {
        case StaRule::Ax:
        case StaRule::W:
            meta["var"] = d->meta.var;
            meta["lintype"] = print_sta_type(d->meta.lintype);
            break;
        case StaRule::LollI:
            meta["var"] = d->meta.var;
            break;
        case StaRule::M:
            meta["domain_vars"] = d->meta.domain_vars;
            meta["range_var"] = d->meta.range_var;
            break;
        case StaRule::ForallI:
            meta["tyvar"] = d->meta.tyvar;
            break;
        case StaRule::ForallE:
            meta["instantiated_with"] =
                print_sta_type(d->meta.instantiated_with);
            break;
        case StaRule::LollE:
        case StaRule::Sp:
            break;
    }
    node["meta"] = std::move(meta);
    json prems = json::array();
    for (const auto& p : d->premises) prems.push_back(sta_to_json(p));
    node["premises"] = std::move(prems);
    return node;
}

StaDerivPtr sta_from_json(const json& j) {
    auto rule = sta_rule_from_name(j.at("rule").get<std::string>());
    if (!rule) throw DerivError("unknown rule tag: " + j.at("rule").dump());
    StaJudgment concl;
    for (const auto& entry : j.at("ctx")) {
        std::string x = entry.at(0).get<std::string>();
        concl.ctx[x] = parse_sta_type(entry.at(1).get<std::string>());
    }
    concl.subject = parse_term_internal(j.at("term").get<std::string>());
    concl.type = parse_sta_type(j.at("type").get<std::string>());
    StaMeta meta;
    const json& m = j.at("meta");
    if (m.contains("var")) meta.var = m.at("var").get<std::string>();
    if (m.contains("lintype"))
        meta.lintype = parse_sta_type(m.at("lintype").get<std::string>());
    if (m.contains("domain_vars"))
        meta.domain_vars = m.at("domain_vars").get<std::vector<std::string>>();
    if (m.contains("range_var"))
        meta.range_var = m.at("range_var").get<std::string>();
    if (m.contains("tyvar")) meta.tyvar = m.at("tyvar").get<std::string>();
    if (m.contains("instantiated_with"))
        meta.instantiated_with =
            parse_sta_type(m.at("instantiated_with").get<std::string>());
    std::vector<StaDerivPtr> prems;
    for (const auto& p : j.at("premises")) prems.push_back(sta_from_json(p));
    return mk_sta_node(*rule, std::move(concl), std::move(meta),
                       std::move(prems));
}

// ----------------------------------------------------------------- corpus

StaTypePtr sta_word_type(int h, int k) {
    StaTypePtr a = mk_sta_tyvar("a");
    StaTypePtr step = mk_sta_arrow(a, a);
    StaTypePtr s0 = step;
    for (int i = 0; i < h; ++i) s0 = mk_sta_bang(s0);
    StaTypePtr s1 = step;
    for (int i = 0; i < k; ++i) s1 = mk_sta_bang(s1);
    return mk_sta_forall(
        "a", mk_sta_arrow(s0, mk_sta_arrow(s1, mk_sta_arrow(a, a))));
}

namespace {

// Lifts the context entry for var from mu to !^levels mu by singleton
// contractions (the range may reuse the domain name).
StaDerivPtr bang_up(StaDerivPtr d, const std::string& var, int levels) {
    for (int i = 0; i < levels; ++i) d = sta_m(d, {var}, var);
    return d;
}

// Types the digit variable: contract its occurrence names (or weaken when
// absent) and lift to !^levels (a -o a).
StaDerivPtr close_digit(StaDerivPtr d, const std::vector<std::string>& occs,
                        const std::string& var, int levels,
                        const StaTypePtr& step) {
    if (occs.empty()) {
        d = sta_w(d, var, step);
        return bang_up(d, var, levels);
    }
    d = sta_m(d, occs, var);
    return bang_up(d, var, levels - 1);
}

}  // namespace

StaDerivPtr sta_numeral_derivation(unsigned long n, int h, int k) {
    if (h < 1 || k < 1)
        throw DerivError("sta_numeral_derivation: parameters must be >= 1");
    StaTypePtr a = mk_sta_tyvar("a");
    StaTypePtr step = mk_sta_arrow(a, a);
    // digits from least significant; applications nest most significant
    // outermost, so build from the innermost (least significant) axiom out
    std::vector<int> digits;
    for (unsigned long v = n; v > 0; v >>= 1) digits.push_back(v & 1);
    StaDerivPtr d = sta_ax("x", a);
    std::vector<std::string> occ0, occ1;
    for (int bit : digits) {
        std::string s = fresh_name();
        (bit ? occ1 : occ0).push_back(s);
        d = sta_lolle(sta_ax(s, step), d);
    }
    d = close_digit(d, occ0, "s0", h, step);
    d = close_digit(d, occ1, "s1", k, step);
    d = sta_lolli(d, "x");
    d = sta_lolli(d, "s1");
    d = sta_lolli(d, "s0");
    return sta_foralli(d, "a");
}

StaDerivPtr sta_succ_derivation(int digit, int m, int n) {
    if (digit != 0 && digit != 1)
        throw DerivError("sta_succ_derivation: digit must be 0 or 1");
    if (m < 1 || n < 1)
        throw DerivError("sta_succ_derivation: parameters must be >= 1");
    StaTypePtr a = mk_sta_tyvar("a");
    StaTypePtr step = mk_sta_arrow(a, a);
    const std::string f = digit == 0 ? "f0" : "f1";  // the doubled variable
    const std::string g = digit == 0 ? "f1" : "f0";
    int fl = digit == 0 ? m : n;  // bang depth of f in the word type
    int gl = digit == 0 ? n : m;

    StaDerivPtr w = sta_foralle(sta_ax("w", sta_word_type(m, n)), a);
    std::string spine_f = fresh_name();
    std::string inner_f = fresh_name();

    // spine arguments must carry the banged types themselves, so they are
    // promoted axioms
    StaDerivPtr farg = sta_ax(spine_f, step);
    for (int i = 0; i < fl; ++i) farg = sta_sp(farg);
    StaDerivPtr garg = sta_ax(g, step);
    for (int i = 0; i < gl; ++i) garg = sta_sp(garg);

    StaDerivPtr last = sta_lolle(sta_ax(inner_f, step), sta_ax("x", a));
    StaDerivPtr body =
        digit == 0 ? sta_lolle(sta_lolle(sta_lolle(w, farg), garg), last)
                   : sta_lolle(sta_lolle(sta_lolle(w, garg), farg), last);
    // lift the inner occurrence to the spine level, then join the two uses
    StaDerivPtr d = bang_up(body, inner_f, fl);
    d = sta_m(d, {spine_f, inner_f}, f);
    d = sta_lolli(d, "x");
    d = sta_lolli(d, "f1");
    d = sta_lolli(d, "f0");
    d = sta_foralli(d, "a");
    return sta_lolli(d, "w");
}

}  // namespace strw
