#include "strw/inter.hpp"

#include <algorithm>
#include <sstream>

namespace strw {

InterPtr mk_inter_tyvar(std::string name) {
    auto t = std::make_shared<InterType>();
    t->kind = InterType::Kind::TyVar;
    t->name = std::move(name);
    return t;
}

InterPtr mk_inter_arrow(InterPtr arg, InterPtr res) {
    if (res->kind == InterType::Kind::Meet)
        throw TypeParseError("no meet on the right of an arrow");
    auto t = std::make_shared<InterType>();
    t->kind = InterType::Kind::Arrow;
    t->arg = std::move(arg);
    t->res = std::move(res);
    return t;
}

InterPtr mk_inter_forall(std::string var, InterPtr body) {
    if (body->kind == InterType::Kind::Meet)
        throw TypeParseError("no meet under a quantifier");
    auto t = std::make_shared<InterType>();
    t->kind = InterType::Kind::Forall;
    t->name = std::move(var);
    t->res = std::move(body);
    return t;
}

InterPtr mk_inter_meet(std::vector<InterPtr> comps) {
    if (comps.size() < 2)
        throw TypeParseError("a meet needs at least two components");
    auto t = std::make_shared<InterType>();
    t->kind = InterType::Kind::Meet;
    t->comps = std::move(comps);
    return t;
}

InterPtr to_inter(const TypePtr& s) {
    switch (s->kind) {
        case StratType::Kind::TyVar:
            return mk_inter_tyvar(s->name);
        case StratType::Kind::Arrow:
            return mk_inter_arrow(to_inter(s->arg), to_inter(s->res));
        case StratType::Kind::Forall:
            return mk_inter_forall(s->name, to_inter(s->res));
        case StratType::Kind::Strat: {
            // the set may hold duplicates before canonicalization; dedup so
            // a semantic singleton also collapses
            TypePtr c = canonicalize(s);
            if (c->comps.size() == 1) return to_inter(c->comps[0]);
            std::vector<InterPtr> comps;
            for (const auto& comp : c->comps) comps.push_back(to_inter(comp));
            return mk_inter_meet(std::move(comps));
        }
    }
    throw TypeParseError("to_inter: unknown kind");
}

// ----------------------------------------------------------------- equality

namespace {

void key_rec(const InterPtr& t, std::vector<std::string>& env,
             std::ostringstream& out);

std::string key_in_env(const InterPtr& t, std::vector<std::string>& env) {
    std::ostringstream out;
    key_rec(t, env, out);
    return out.str();
}

void key_rec(const InterPtr& t, std::vector<std::string>& env,
             std::ostringstream& out) {
    switch (t->kind) {
        case InterType::Kind::TyVar: {
            for (size_t i = env.size(); i > 0; --i) {
                if (env[i - 1] == t->name) {
                    out << '#' << env.size() - i;
                    return;
                }
            }
            out << t->name;
            return;
        }
        case InterType::Kind::Arrow:
            out << '(';
            key_rec(t->arg, env, out);
            out << ">";
            key_rec(t->res, env, out);
            out << ')';
            return;
        case InterType::Kind::Forall: {
            out << "A.";
            env.push_back(t->name);
            key_rec(t->res, env, out);
            env.pop_back();
            return;
        }
        case InterType::Kind::Meet: {
            std::vector<std::string> keys;
            for (const auto& c : t->comps) keys.push_back(key_in_env(c, env));
            std::sort(keys.begin(), keys.end());
            keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
            if (keys.size() == 1) {
                // idempotent collapse
                out << keys[0];
                return;
            }
            out << '^';
            for (size_t i = 0; i < keys.size(); ++i) {
                if (i) out << ',';
                out << keys[i];
            }
            out << '$';
            return;
        }
    }
}

}  // namespace

bool inter_eq(const InterPtr& a, const InterPtr& b) {
    std::vector<std::string> env;
    return a == b || key_in_env(a, env) == key_in_env(b, env);
}

std::string print_inter(const InterPtr& t) {
    switch (t->kind) {
        case InterType::Kind::TyVar:
            return t->name;
        case InterType::Kind::Arrow: {
            std::string lhs = print_inter(t->arg);
            if (t->arg->kind == InterType::Kind::Arrow ||
                t->arg->kind == InterType::Kind::Forall)
                lhs = "(" + lhs + ")";
            return lhs + " -> " + print_inter(t->res);
        }
        case InterType::Kind::Forall:
            return "forall " + t->name + ". " + print_inter(t->res);
        case InterType::Kind::Meet: {
            std::string out;
            for (size_t i = 0; i < t->comps.size(); ++i) {
                if (i) out += " /\\ ";
                std::string c = print_inter(t->comps[i]);
                if (t->comps[i]->kind != InterType::Kind::TyVar)
                    c = "(" + c + ")";
                out += c;
            }
            return out;
        }
    }
    return "?";
}

}  // namespace strw
