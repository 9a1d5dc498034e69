#include "strw/type.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <sstream>

#include "strw/term.hpp"

namespace strw {

TypePtr mk_tyvar(std::string name) {
    auto t = std::make_shared<StratType>();
    t->kind = StratType::Kind::TyVar;
    t->name = std::move(name);
    return t;
}

TypePtr mk_arrow(TypePtr arg, TypePtr res) {
    if (!is_linear(res))
        throw std::invalid_argument("arrow result must be linear");
    auto t = std::make_shared<StratType>();
    t->kind = StratType::Kind::Arrow;
    t->arg = std::move(arg);
    t->res = std::move(res);
    return t;
}

TypePtr mk_forall(std::string var, TypePtr body) {
    if (!is_linear(body))
        throw std::invalid_argument("forall body must be linear");
    auto t = std::make_shared<StratType>();
    t->kind = StratType::Kind::Forall;
    t->name = std::move(var);
    t->res = std::move(body);
    return t;
}

TypePtr mk_strat(std::vector<TypePtr> comps) {
    if (comps.empty())
        throw std::invalid_argument("set type needs at least one component");
    auto t = std::make_shared<StratType>();
    t->kind = StratType::Kind::Strat;
    t->comps = std::move(comps);
    return t;
}

bool is_linear(const TypePtr& t) {
    return t->kind != StratType::Kind::Strat;
}

std::string fresh_tyvar_name() {
    // shares the term-level counter; the trailing "t" only aids readability
    return fresh_name() + "t";
}

void note_reserved_tyvars(const TypePtr& t) {
    std::function<void(const TypePtr&)> go = [&](const TypePtr& u) {
        const std::string* name = nullptr;
        if (u->kind == StratType::Kind::TyVar || u->kind == StratType::Kind::Forall)
            name = &u->name;
        if (name && is_reserved_name(*name)) {
            unsigned long idx = 0;
            size_t i = 2;
            while (i < name->size() &&
                   std::isdigit(static_cast<unsigned char>((*name)[i])))
                idx = idx * 10 + static_cast<unsigned long>((*name)[i++] - '0');
            reserve_fresh_names_above(idx);
        }
        if (u->arg) go(u->arg);
        if (u->res) go(u->res);
        for (const auto& c : u->comps) go(c);
    };
    go(t);
}

// ---------------------------------------------------------------- parsing

namespace {

struct TypeParser {
    std::string_view src;
    size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
            ++pos;
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool eat(std::string_view tok) {
        skip_ws();
        if (src.substr(pos, tok.size()) == tok) {
            pos += tok.size();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw TypeParseError(msg + " at offset " + std::to_string(pos));
    }

    std::string ident() {
        skip_ws();
        if (pos >= src.size() ||
            !(std::isalpha(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            fail("expected type variable");
        size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_' || src[pos] == '\''))
            ++pos;
        return std::string(src.substr(start, pos - start));
    }

    TypePtr strat() {
        if (peek() == '{') {
            ++pos;
            std::vector<TypePtr> comps;
            comps.push_back(strat());
            while (peek() == ',') {
                ++pos;
                comps.push_back(strat());
            }
            if (peek() != '}') fail("expected '}'");
            ++pos;
            TypePtr set = mk_strat(std::move(comps));
            return arrow_tail(set);
        }
        return lin();
    }

    // after a left operand, "-o" chains right-associatively into a linear type
    TypePtr arrow_tail(TypePtr lhs) {
        skip_ws();
        if (eat("-o")) {
            TypePtr rhs = lin();
            return mk_arrow(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    TypePtr lin() {
        skip_ws();
        if (src.substr(pos, 6) == "forall" &&
            (pos + 6 >= src.size() ||
             !std::isalnum(static_cast<unsigned char>(src[pos + 6])))) {
            pos += 6;
            std::string var = ident();
            if (peek() != '.') fail("expected '.'");
            ++pos;
            return mk_forall(std::move(var), lin());
        }
        TypePtr head;
        if (peek() == '{') {
            head = strat();
            if (is_linear(head)) return head;  // already consumed an arrow
            skip_ws();
            if (!eat("-o")) fail("set type in linear position needs '-o'");
            return mk_arrow(std::move(head), lin());
        }
        if (peek() == '(') {
            ++pos;
            head = strat();
            if (peek() != ')') fail("expected ')'");
            ++pos;
        } else {
            head = mk_tyvar(ident());
        }
        skip_ws();
        if (eat("-o")) return mk_arrow(std::move(head), lin());
        return head;
    }
};

}  // namespace

TypePtr parse_type(std::string_view text) {
    TypeParser p{text};
    TypePtr t = p.strat();
    p.skip_ws();
    if (p.pos < p.src.size()) p.fail("trailing input");
    return t;
}

// --------------------------------------------------------------- printing

static void print_rec(const TypePtr& t, std::ostringstream& out, bool arrow_lhs) {
    switch (t->kind) {
        case StratType::Kind::TyVar:
            out << t->name;
            break;
        case StratType::Kind::Arrow:
            if (arrow_lhs) out << '(';
            print_rec(t->arg, out, true);
            out << " -o ";
            print_rec(t->res, out, false);
            if (arrow_lhs) out << ')';
            break;
        case StratType::Kind::Forall:
            if (arrow_lhs) out << '(';
            out << "forall " << t->name << ". ";
            print_rec(t->res, out, false);
            if (arrow_lhs) out << ')';
            break;
        case StratType::Kind::Strat:
            out << '{';
            for (size_t i = 0; i < t->comps.size(); ++i) {
                if (i) out << ", ";
                print_rec(t->comps[i], out, false);
            }
            out << '}';
            break;
    }
}

std::string print_type(const TypePtr& t) {
    std::ostringstream out;
    print_rec(t, out, false);
    return out.str();
}

// --------------------------------------------------------- canonical form

// key with positional numbering of forall binders, so alpha-variants agree
static void key_rec(const TypePtr& t, std::vector<std::string>& env,
                    std::ostringstream& out) {
    switch (t->kind) {
        case StratType::Kind::TyVar: {
            for (size_t i = env.size(); i-- > 0;) {
                if (env[i] == t->name) {
                    out << '%' << (env.size() - 1 - i);
                    return;
                }
            }
            out << '`' << t->name;
            break;
        }
        case StratType::Kind::Arrow:
            out << '(';
            key_rec(t->arg, env, out);
            out << '>';
            key_rec(t->res, env, out);
            out << ')';
            break;
        case StratType::Kind::Forall:
            out << 'A';
            env.push_back(t->name);
            key_rec(t->res, env, out);
            env.pop_back();
            break;
        case StratType::Kind::Strat: {
            out << '{';
            for (size_t i = 0; i < t->comps.size(); ++i) {
                if (i) out << ',';
                key_rec(t->comps[i], env, out);
            }
            out << '}';
            break;
        }
    }
}

static std::string key_in_env(const TypePtr& t, std::vector<std::string>& env) {
    std::ostringstream out;
    key_rec(t, env, out);
    return out.str();
}

static TypePtr canon_rec(const TypePtr& t, std::vector<std::string>& env) {
    switch (t->kind) {
        case StratType::Kind::TyVar:
            return t;
        case StratType::Kind::Arrow:
            return mk_arrow(canon_rec(t->arg, env), canon_rec(t->res, env));
        case StratType::Kind::Forall: {
            env.push_back(t->name);
            TypePtr body = canon_rec(t->res, env);
            env.pop_back();
            return mk_forall(t->name, body);
        }
        case StratType::Kind::Strat: {
            std::vector<std::pair<std::string, TypePtr>> keyed;
            for (const auto& c : t->comps) {
                TypePtr cc = canon_rec(c, env);
                keyed.emplace_back(key_in_env(cc, env), std::move(cc));
            }
            std::sort(keyed.begin(), keyed.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<TypePtr> comps;
            for (size_t i = 0; i < keyed.size(); ++i) {
                if (i && keyed[i].first == keyed[i - 1].first) continue;
                comps.push_back(keyed[i].second);
            }
            return mk_strat(std::move(comps));
        }
    }
    return t;
}

TypePtr canonicalize(const TypePtr& t) {
    std::vector<std::string> env;
    return canon_rec(t, env);
}

std::string canonical_key(const TypePtr& t) {
    std::vector<std::string> env;
    TypePtr c = canon_rec(t, env);
    return key_in_env(c, env);
}

bool type_eq(const TypePtr& a, const TypePtr& b) {
    return a == b || canonical_key(a) == canonical_key(b);
}

// ------------------------------------------------------------ components

static void components_rec(const TypePtr& t, std::vector<TypePtr>& out) {
    if (t->kind == StratType::Kind::Strat) {
        for (const auto& c : t->comps) components_rec(c, out);
    } else {
        out.push_back(t);
    }
}

std::vector<TypePtr> linear_components(const TypePtr& t) {
    std::vector<TypePtr> out;
    components_rec(canonicalize(t), out);
    return out;
}

TypePtr stratify_n(const TypePtr& t, int n) {
    TypePtr cur = t;
    for (int i = 0; i < n; ++i) cur = mk_strat({cur});
    return cur;
}

TypePtr union_strat(const std::vector<TypePtr>& ss) {
    if (ss.empty()) throw std::invalid_argument("union_strat: empty input");
    return canonicalize(mk_strat(ss));
}

// ----------------------------------------------------------- substitution

std::set<std::string> free_tyvars(const TypePtr& t) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    std::function<void(const TypePtr&)> go = [&](const TypePtr& u) {
        switch (u->kind) {
            case StratType::Kind::TyVar:
                if (std::find(bound.begin(), bound.end(), u->name) == bound.end())
                    out.insert(u->name);
                break;
            case StratType::Kind::Arrow:
                go(u->arg);
                go(u->res);
                break;
            case StratType::Kind::Forall:
                bound.push_back(u->name);
                go(u->res);
                bound.pop_back();
                break;
            case StratType::Kind::Strat:
                for (const auto& c : u->comps) go(c);
                break;
        }
    };
    go(t);
    return out;
}

std::set<std::string> free_tyvars(const TypeContext& ctx) {
    std::set<std::string> out;
    for (const auto& [_, ty] : ctx) {
        auto vs = free_tyvars(ty);
        out.insert(vs.begin(), vs.end());
    }
    return out;
}

static TypePtr subst_rec(const TypePtr& t, const std::string& a, const TypePtr& b,
                         const std::set<std::string>& avoid) {
    switch (t->kind) {
        case StratType::Kind::TyVar:
            return t->name == a ? b : t;
        case StratType::Kind::Arrow:
            return mk_arrow(subst_rec(t->arg, a, b, avoid),
                            subst_rec(t->res, a, b, avoid));
        case StratType::Kind::Forall: {
            if (t->name == a) return t;  // bound occurrence shadows
            if (avoid.count(t->name)) {
                std::string nb = fresh_tyvar_name();
                TypePtr renamed =
                    subst_rec(t->res, t->name, mk_tyvar(nb), {});
                return mk_forall(nb, subst_rec(renamed, a, b, avoid));
            }
            return mk_forall(t->name, subst_rec(t->res, a, b, avoid));
        }
        case StratType::Kind::Strat: {
            std::vector<TypePtr> comps;
            comps.reserve(t->comps.size());
            for (const auto& c : t->comps) comps.push_back(subst_rec(c, a, b, avoid));
            return mk_strat(std::move(comps));
        }
    }
    return t;
}

TypePtr subst_tyvar(const TypePtr& t, const std::string& a, const TypePtr& b) {
    if (!is_linear(b))
        throw std::invalid_argument("subst_tyvar: replacement must be linear");
    return subst_rec(t, a, b, free_tyvars(b));
}

// --------------------------------------------------------------- contexts

TypeContext context_union(const std::vector<TypeContext>& cs) {
    if (cs.empty()) throw std::invalid_argument("context_union: empty input");
    for (const auto& c : cs) {
        if (c.size() != cs.front().size())
            throw std::invalid_argument("context_union: domain mismatch");
        for (const auto& [x, _] : c)
            if (!cs.front().count(x))
                throw std::invalid_argument("context_union: domain mismatch on " + x);
    }
    TypeContext out;
    for (const auto& [x, _] : cs.front()) {
        std::vector<TypePtr> singletons;
        singletons.reserve(cs.size());
        for (const auto& c : cs) singletons.push_back(c.at(x));
        out[x] = union_strat(singletons);
    }
    return out;
}

std::string print_context(const TypeContext& ctx) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [x, ty] : ctx) {
        if (!first) out << ", ";
        first = false;
        out << x << ": " << print_type(ty);
    }
    return out.str();
}

}  // namespace strw
