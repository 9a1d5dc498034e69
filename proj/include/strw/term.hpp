#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strw {

// Pure lambda terms. Nodes are immutable and shared; any operation that
// "modifies" a term builds a new tree.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Abs, App };

    Kind kind;
    std::string name;   // Var: the variable; Abs: the binder
    TermPtr left;       // Abs: body; App: function
    TermPtr right;      // App: argument
};

TermPtr mk_var(std::string name);
TermPtr mk_abs(std::string binder, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);

// Fresh names come from a process-wide monotone counter and use the
// reserved prefix "_g"; the parser refuses identifiers with that prefix.
std::string fresh_name();
bool is_reserved_name(std::string_view name);

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg), position(pos) {}
};

// Grammar:  term := lam | app ; lam := "\" ident+ "." term ;
//           app := atom atom* ; atom := ident | "(" term ")"
// "--" starts a comment running to end of line. Binders in the result are
// renamed apart (with primes) from each other and from all free variables.
TermPtr parse_term(std::string_view text);

// Same grammar but admits reserved "_g" identifiers; used when reloading
// serialized data. Bumps the fresh-name counter past any "_g<n>" seen.
TermPtr parse_term_internal(std::string_view text);

// Keeps fresh_name() from colliding with already-materialized names.
void reserve_fresh_names_above(unsigned long n);

std::string print_term(const TermPtr& t);

long term_size(const TermPtr& t);
std::set<std::string> free_vars(const TermPtr& t);

// Simultaneous capture-free substitution; binding variables must be
// pairwise distinct.
TermPtr substitute(const TermPtr& t,
                   const std::vector<std::pair<std::string, TermPtr>>& bindings);

// Renames free occurrences of variables (capture-avoiding on the way down).
TermPtr rename_free(const TermPtr& t, const std::map<std::string, std::string>& renames);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// de Bruijn canonical print; equal strings iff alpha-equivalent.
std::string alpha_key(const TermPtr& t);

// Renames binders so all are distinct and disjoint from free variables.
TermPtr freshen_binders(const TermPtr& t);

enum class Step { Fun, Arg, Body };
using RedexPosition = std::vector<Step>;

std::optional<TermPtr> subterm_at(const TermPtr& t, const RedexPosition& pos);
std::vector<RedexPosition> redex_positions(const TermPtr& t);
bool is_normal_form(const TermPtr& t);

struct NotARedex : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TermPtr beta_step(const TermPtr& t, const RedexPosition& at);

struct ReduceResult {
    TermPtr term;       // normal form on success, last term on fuel exhaustion
    long steps = 0;
    bool fuel_exhausted = false;
};

// Leftmost-outermost reduction.
ReduceResult reduce_to_nf(TermPtr t, long fuel);

enum class SnVerdict { Yes, No, Unknown };

// Exhaustive search over all one-step reducts, memoized on alpha-canonical
// forms. A term alpha-equal to an ancestor on the current path witnesses
// divergence. fuel counts node expansions.
SnVerdict is_sn(const TermPtr& t, long fuel);

// Every closed term of size <= max_size, one representative per alpha-class,
// in a deterministic order. Supported up to max_size = 12.
std::vector<TermPtr> enumerate_closed_terms(int max_size);

}  // namespace strw
