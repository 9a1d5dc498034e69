#include "strw/term.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace strw {

TermPtr mk_var(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Var;
    t->name = std::move(name);
    return t;
}

TermPtr mk_abs(std::string binder, TermPtr body) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Abs;
    t->name = std::move(binder);
    t->left = std::move(body);
    return t;
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::App;
    t->left = std::move(fun);
    t->right = std::move(arg);
    return t;
}

static std::atomic<unsigned long> g_fresh_counter{0};

std::string fresh_name() {
    return "_g" + std::to_string(g_fresh_counter.fetch_add(1));
}

void reserve_fresh_names_above(unsigned long n) {
    unsigned long cur = g_fresh_counter.load();
    while (cur <= n && !g_fresh_counter.compare_exchange_weak(cur, n + 1)) {
    }
}

bool is_reserved_name(std::string_view name) {
    return name.size() >= 2 && name[0] == '_' && name[1] == 'g';
}

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
    std::string_view src;
    size_t pos = 0;
    bool allow_reserved = false;

    void skip_ws() {
        while (pos < src.size()) {
            if (std::isspace(static_cast<unsigned char>(src[pos]))) {
                ++pos;
            } else if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == '-') {
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    bool at_end() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " at offset " + std::to_string(pos), pos);
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    std::string ident() {
        skip_ws();
        if (pos >= src.size() || !ident_start(src[pos])) fail("expected identifier");
        size_t start = pos;
        while (pos < src.size() && ident_char(src[pos])) ++pos;
        std::string name(src.substr(start, pos - start));
        if (is_reserved_name(name)) {
            if (!allow_reserved) {
                pos = start;
                fail("identifier prefix '_g' is reserved");
            }
            unsigned long idx = 0;
            size_t i = 2;
            while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i])))
                idx = idx * 10 + static_cast<unsigned long>(name[i++] - '0');
            reserve_fresh_names_above(idx);
        }
        return name;
    }

    TermPtr term() {
        if (peek() == '\\') {
            ++pos;
            std::vector<std::string> binders;
            binders.push_back(ident());
            while (peek() != '.') binders.push_back(ident());
            ++pos;  // consume '.'
            TermPtr body = term();
            for (auto it = binders.rbegin(); it != binders.rend(); ++it)
                body = mk_abs(*it, body);
            return body;
        }
        TermPtr acc = atom();
        while (true) {
            char c = peek();
            if (c == '\0' || c == ')' || c == '.') break;
            acc = mk_app(acc, atom());
        }
        return acc;
    }

    TermPtr atom() {
        char c = peek();
        if (c == '(') {
            ++pos;
            TermPtr inner = term();
            if (peek() != ')') fail("expected ')'");
            ++pos;
            return inner;
        }
        if (c == '\\') fail("lambda must be parenthesized in argument position");
        return mk_var(ident());
    }
};

}  // namespace

namespace {

// renames binders with prime suffixes until all binders are distinct from
// each other and from every free variable
TermPtr uniquify_rec(const TermPtr& t, std::map<std::string, std::string>& env,
                     std::set<std::string>& used) {
    switch (t->kind) {
        case Term::Kind::Var: {
            auto it = env.find(t->name);
            return it != env.end() ? mk_var(it->second) : t;
        }
        case Term::Kind::Abs: {
            std::string nb = t->name;
            while (used.count(nb)) nb += '\'';
            used.insert(nb);
            auto it = env.find(t->name);
            std::optional<std::string> saved;
            if (it != env.end()) saved = it->second;
            env[t->name] = nb;
            TermPtr body = uniquify_rec(t->left, env, used);
            if (saved) env[t->name] = *saved; else env.erase(t->name);
            return mk_abs(nb, body);
        }
        case Term::Kind::App:
            return mk_app(uniquify_rec(t->left, env, used),
                          uniquify_rec(t->right, env, used));
    }
    return t;
}

TermPtr uniquify_binders(const TermPtr& t) {
    std::map<std::string, std::string> env;
    std::set<std::string> used = free_vars(t);
    return uniquify_rec(t, env, used);
}

}  // namespace

TermPtr parse_term(std::string_view text) {
    Parser p{text};
    TermPtr t = p.term();
    if (!p.at_end()) p.fail("trailing input");
    return uniquify_binders(t);
}

TermPtr parse_term_internal(std::string_view text) {
    Parser p{text};
    p.allow_reserved = true;
    TermPtr t = p.term();
    if (!p.at_end()) p.fail("trailing input");
    return t;
}

// --------------------------------------------------------------- printing

static bool needs_parens_fun(const TermPtr& t) { return t->kind == Term::Kind::Abs; }
static bool needs_parens_arg(const TermPtr& t) { return t->kind != Term::Kind::Var; }

static void print_rec(const TermPtr& t, std::ostringstream& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            out << t->name;
            break;
        case Term::Kind::Abs: {
            out << '\\' << t->name;
            TermPtr body = t->left;
            while (body->kind == Term::Kind::Abs) {
                out << ' ' << body->name;
                body = body->left;
            }
            out << '.';
            print_rec(body, out);
            break;
        }
        case Term::Kind::App: {
            if (needs_parens_fun(t->left)) {
                out << '(';
                print_rec(t->left, out);
                out << ')';
            } else {
                print_rec(t->left, out);
            }
            out << ' ';
            if (needs_parens_arg(t->right)) {
                out << '(';
                print_rec(t->right, out);
                out << ')';
            } else {
                print_rec(t->right, out);
            }
            break;
        }
    }
}

std::string print_term(const TermPtr& t) {
    std::ostringstream out;
    print_rec(t, out);
    return out.str();
}

// ------------------------------------------------------------- structure

long term_size(const TermPtr& t) {
    switch (t->kind) {
        case Term::Kind::Var: return 1;
        case Term::Kind::Abs: return term_size(t->left) + 1;
        case Term::Kind::App: return term_size(t->left) + term_size(t->right) + 1;
    }
    return 0;
}

static void free_vars_rec(const TermPtr& t, std::set<std::string>& bound,
                          std::set<std::string>& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            if (!bound.count(t->name)) out.insert(t->name);
            break;
        case Term::Kind::Abs: {
            bool fresh = bound.insert(t->name).second;
            free_vars_rec(t->left, bound, out);
            if (fresh) bound.erase(t->name);
            break;
        }
        case Term::Kind::App:
            free_vars_rec(t->left, bound, out);
            free_vars_rec(t->right, bound, out);
            break;
    }
}

std::set<std::string> free_vars(const TermPtr& t) {
    std::set<std::string> bound, out;
    free_vars_rec(t, bound, out);
    return out;
}

static TermPtr subst_rec(const TermPtr& t, std::map<std::string, TermPtr>& sub,
                         const std::set<std::string>& avoid) {
    switch (t->kind) {
        case Term::Kind::Var: {
            auto it = sub.find(t->name);
            return it != sub.end() ? it->second : t;
        }
        case Term::Kind::Abs: {
            std::string binder = t->name;
            TermPtr body = t->left;
            auto shadowed = sub.find(binder);
            if (shadowed != sub.end()) {
                // shadowing: drop the binding inside
                TermPtr saved = shadowed->second;
                sub.erase(shadowed);
                TermPtr nb = subst_rec(body, sub, avoid);
                sub.emplace(binder, saved);
                return nb == body ? t : mk_abs(binder, nb);
            }
            if (avoid.count(binder)) {
                // would capture: rename the binder first
                std::string nb = fresh_name();
                body = rename_free(body, {{binder, nb}});
                binder = nb;
            }
            TermPtr nb = subst_rec(body, sub, avoid);
            return (nb == t->left && binder == t->name) ? t : mk_abs(binder, nb);
        }
        case Term::Kind::App: {
            TermPtr l = subst_rec(t->left, sub, avoid);
            TermPtr r = subst_rec(t->right, sub, avoid);
            return (l == t->left && r == t->right) ? t : mk_app(l, r);
        }
    }
    return t;
}

TermPtr substitute(const TermPtr& t,
                   const std::vector<std::pair<std::string, TermPtr>>& bindings) {
    std::map<std::string, TermPtr> sub;
    std::set<std::string> avoid;
    for (const auto& [x, n] : bindings) {
        if (!sub.emplace(x, n).second)
            throw std::invalid_argument("substitute: duplicate variable " + x);
        for (const auto& v : free_vars(n)) avoid.insert(v);
    }
    return subst_rec(t, sub, avoid);
}

TermPtr rename_free(const TermPtr& t, const std::map<std::string, std::string>& renames) {
    std::vector<std::pair<std::string, TermPtr>> bindings;
    bindings.reserve(renames.size());
    for (const auto& [from, to] : renames) bindings.emplace_back(from, mk_var(to));
    return substitute(t, bindings);
}

// ---------------------------------------------------------- alpha handling

static void alpha_key_rec(const TermPtr& t, std::vector<std::string>& env,
                          std::ostringstream& out) {
    switch (t->kind) {
        case Term::Kind::Var: {
            for (size_t i = env.size(); i-- > 0;) {
                if (env[i] == t->name) {
                    out << '#' << (env.size() - 1 - i);
                    return;
                }
            }
            out << '`' << t->name;  // free variables keep their name
            break;
        }
        case Term::Kind::Abs:
            out << 'L';
            env.push_back(t->name);
            alpha_key_rec(t->left, env, out);
            env.pop_back();
            break;
        case Term::Kind::App:
            out << '(';
            alpha_key_rec(t->left, env, out);
            out << ' ';
            alpha_key_rec(t->right, env, out);
            out << ')';
            break;
    }
}

std::string alpha_key(const TermPtr& t) {
    std::ostringstream out;
    std::vector<std::string> env;
    alpha_key_rec(t, env, out);
    return out.str();
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
    return a == b || alpha_key(a) == alpha_key(b);
}

static TermPtr freshen_rec(const TermPtr& t, std::map<std::string, std::string>& env) {
    switch (t->kind) {
        case Term::Kind::Var: {
            auto it = env.find(t->name);
            return it != env.end() ? mk_var(it->second) : t;
        }
        case Term::Kind::Abs: {
            std::string nb = fresh_name();
            auto it = env.find(t->name);
            std::optional<std::string> saved;
            if (it != env.end()) saved = it->second;
            env[t->name] = nb;
            TermPtr body = freshen_rec(t->left, env);
            if (saved) env[t->name] = *saved; else env.erase(t->name);
            return mk_abs(nb, body);
        }
        case Term::Kind::App:
            return mk_app(freshen_rec(t->left, env), freshen_rec(t->right, env));
    }
    return t;
}

TermPtr freshen_binders(const TermPtr& t) {
    std::map<std::string, std::string> env;
    return freshen_rec(t, env);
}

// -------------------------------------------------------------- reduction

std::optional<TermPtr> subterm_at(const TermPtr& t, const RedexPosition& pos) {
    TermPtr cur = t;
    for (Step s : pos) {
        switch (s) {
            case Step::Fun:
                if (cur->kind != Term::Kind::App) return std::nullopt;
                cur = cur->left;
                break;
            case Step::Arg:
                if (cur->kind != Term::Kind::App) return std::nullopt;
                cur = cur->right;
                break;
            case Step::Body:
                if (cur->kind != Term::Kind::Abs) return std::nullopt;
                cur = cur->left;
                break;
        }
    }
    return cur;
}

static void redexes_rec(const TermPtr& t, RedexPosition& cur,
                        std::vector<RedexPosition>& out) {
    switch (t->kind) {
        case Term::Kind::Var:
            break;
        case Term::Kind::Abs:
            cur.push_back(Step::Body);
            redexes_rec(t->left, cur, out);
            cur.pop_back();
            break;
        case Term::Kind::App:
            if (t->left->kind == Term::Kind::Abs) out.push_back(cur);
            cur.push_back(Step::Fun);
            redexes_rec(t->left, cur, out);
            cur.pop_back();
            cur.push_back(Step::Arg);
            redexes_rec(t->right, cur, out);
            cur.pop_back();
            break;
    }
}

std::vector<RedexPosition> redex_positions(const TermPtr& t) {
    std::vector<RedexPosition> out;
    RedexPosition cur;
    redexes_rec(t, cur, out);
    return out;
}

bool is_normal_form(const TermPtr& t) { return redex_positions(t).empty(); }

static TermPtr beta_rec(const TermPtr& t, const RedexPosition& at, size_t i) {
    if (i == at.size()) {
        if (t->kind != Term::Kind::App || t->left->kind != Term::Kind::Abs)
            throw NotARedex("no redex at the given position");
        return substitute(t->left->left, {{t->left->name, t->right}});
    }
    switch (at[i]) {
        case Step::Fun:
            if (t->kind != Term::Kind::App) throw NotARedex("position leaves the term");
            return mk_app(beta_rec(t->left, at, i + 1), t->right);
        case Step::Arg:
            if (t->kind != Term::Kind::App) throw NotARedex("position leaves the term");
            return mk_app(t->left, beta_rec(t->right, at, i + 1));
        case Step::Body:
            if (t->kind != Term::Kind::Abs) throw NotARedex("position leaves the term");
            return mk_abs(t->name, beta_rec(t->left, at, i + 1));
    }
    throw NotARedex("bad position");
}

TermPtr beta_step(const TermPtr& t, const RedexPosition& at) {
    return beta_rec(t, at, 0);
}

ReduceResult reduce_to_nf(TermPtr t, long fuel) {
    ReduceResult res;
    res.term = std::move(t);
    while (true) {
        auto rs = redex_positions(res.term);
        if (rs.empty()) return res;
        if (res.steps >= fuel) {
            res.fuel_exhausted = true;
            return res;
        }
        // positions are emitted in leftmost-outermost order already
        res.term = beta_step(res.term, rs.front());
        ++res.steps;
    }
}

// ----------------------------------------------------------------- is_sn

namespace {

struct SnSearch {
    std::unordered_map<std::string, SnVerdict> memo;
    std::unordered_set<std::string> on_path;
    long fuel;

    // some divergent terms never revisit an ancestor whole, but keep growing
    // around a copy of one; an ancestor A with A ->+ C[A] reduces forever
    bool contains_ancestor(const TermPtr& t) const {
        if (on_path.count(alpha_key(t))) return true;
        if (t->left && contains_ancestor(t->left)) return true;
        if (t->right && contains_ancestor(t->right)) return true;
        return false;
    }

    SnVerdict visit(const TermPtr& t) {
        std::string key = alpha_key(t);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        if (on_path.count(key)) return SnVerdict::No;  // cycle: t ->+ t
        if (fuel-- <= 0) return SnVerdict::Unknown;
        if (contains_ancestor(t)) {
            memo[key] = SnVerdict::No;
            return SnVerdict::No;
        }

        auto rs = redex_positions(t);
        if (rs.empty()) {
            memo[key] = SnVerdict::Yes;
            return SnVerdict::Yes;
        }
        on_path.insert(key);
        SnVerdict verdict = SnVerdict::Yes;
        for (const auto& pos : rs) {
            SnVerdict v = visit(beta_step(t, pos));
            if (v == SnVerdict::No) { verdict = SnVerdict::No; break; }
            if (v == SnVerdict::Unknown) verdict = SnVerdict::Unknown;
        }
        on_path.erase(key);
        if (verdict != SnVerdict::Unknown) memo[key] = verdict;
        return verdict;
    }
};

}  // namespace

SnVerdict is_sn(const TermPtr& t, long fuel) {
    SnSearch search;
    search.fuel = fuel;
    return search.visit(t);
}

// ---------------------------------------------------------- enumeration

namespace {

// de Bruijn skeletons, built size-indexed; var = 1, abs and app add 1.
struct Db {
    int kind;  // 0 var, 1 abs, 2 app
    int index = 0;
    std::shared_ptr<const Db> a, b;
};
using DbPtr = std::shared_ptr<const Db>;

void enumerate_db(int size, int depth, std::vector<DbPtr>& out) {
    if (size <= 0) return;
    if (size == 1) {
        for (int i = 0; i < depth; ++i) {
            auto v = std::make_shared<Db>();
            v->kind = 0;
            v->index = i;
            out.push_back(std::move(v));
        }
        return;
    }
    {
        std::vector<DbPtr> bodies;
        enumerate_db(size - 1, depth + 1, bodies);
        for (auto& b : bodies) {
            auto l = std::make_shared<Db>();
            l->kind = 1;
            l->a = std::move(b);
            out.push_back(std::move(l));
        }
    }
    for (int ls = 1; ls <= size - 1 - 1; ++ls) {
        std::vector<DbPtr> lhs, rhs;
        enumerate_db(ls, depth, lhs);
        enumerate_db(size - 1 - ls, depth, rhs);
        for (const auto& l : lhs)
            for (const auto& r : rhs) {
                auto ap = std::make_shared<Db>();
                ap->kind = 2;
                ap->a = l;
                ap->b = r;
                out.push_back(std::move(ap));
            }
    }
}

TermPtr db_to_term(const DbPtr& d, std::vector<std::string>& env) {
    switch (d->kind) {
        case 0:
            return mk_var(env[env.size() - 1 - d->index]);
        case 1: {
            env.push_back("x" + std::to_string(env.size()));
            TermPtr body = db_to_term(d->a, env);
            TermPtr res = mk_abs(env.back(), body);
            env.pop_back();
            return res;
        }
        default:
            return mk_app(db_to_term(d->a, env), db_to_term(d->b, env));
    }
}

}  // namespace

std::vector<TermPtr> enumerate_closed_terms(int max_size) {
    if (max_size > 12)
        throw std::invalid_argument("enumerate_closed_terms: max_size above 12");
    std::vector<TermPtr> out;
    for (int s = 1; s <= max_size; ++s) {
        std::vector<DbPtr> skel;
        enumerate_db(s, 0, skel);
        for (const auto& d : skel) {
            std::vector<std::string> env;
            out.push_back(db_to_term(d, env));
        }
    }
    return out;
}

}  // namespace strw
