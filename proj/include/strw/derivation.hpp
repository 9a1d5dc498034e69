#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

#include "strw/term.hpp"
#include "strw/type.hpp"

namespace strw {

using BigInt = boost::multiprecision::cpp_int;

enum class Rule { Ax, W, LollI, LollE, M, St, ForallI, ForallE };

std::string rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view s);

struct Judgment {
    TypeContext ctx;
    TermPtr subject;
    TypePtr type;
};

// Rule-specific payload; unused fields stay empty.
struct Meta {
    std::string var;                       // Ax, W, LollI
    TypePtr lintype;                       // Ax, W
    std::vector<std::string> domain_vars;  // M
    std::string range_var;                 // M
    std::string tyvar;                     // ForallI, ForallE
    TypePtr instantiated_with;             // ForallE
};

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
    Rule rule;
    Judgment conclusion;
    Meta meta;
    std::vector<DerivPtr> premises;
};

// Raw node without any validation; the checker is the authority.
DerivPtr mk_node(Rule rule, Judgment conclusion, Meta meta,
                 std::vector<DerivPtr> premises);

struct DerivError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Builders compute the conclusion from the premises and throw DerivError
// when a side condition fails, so everything assembled through them is
// valid by construction.
DerivPtr d_ax(const std::string& x, TypePtr a);
DerivPtr d_w(DerivPtr prem, const std::string& x, TypePtr a);
DerivPtr d_lolli(DerivPtr prem, const std::string& x);
DerivPtr d_lolle(DerivPtr fun, DerivPtr arg);
DerivPtr d_m(DerivPtr prem, std::vector<std::string> domain_vars,
             const std::string& range_var);
DerivPtr d_st(std::vector<DerivPtr> prems);
DerivPtr d_foralli(DerivPtr prem, const std::string& a);
DerivPtr d_foralle(DerivPtr prem, TypePtr instantiated_with);

struct Violation {
    std::vector<int> path;  // premise indices from the root
    std::string reason;     // machine-readable code
};

// Full re-validation; reports the first failing node in preorder.
std::optional<Violation> check(const DerivPtr& d);

struct Measures {
    long subject_size = 0;
    long rank = 1;
    long degree = 0;
    DerivPtr deriv;

    BigInt weight_at(unsigned long r) const;
};

Measures measures(const DerivPtr& d);
BigInt weight_at(const DerivPtr& d, unsigned long r);

// Raw measure components without validation.
long rank_of(const DerivPtr& d);
long degree_of(const DerivPtr& d);

// Every term variable mentioned anywhere in the tree (contexts, subjects,
// multiplexor domains).
std::set<std::string> derivation_vars(const DerivPtr& d);

// Clean: at every application node the two premise sub-derivations mention
// disjoint variable sets.
bool is_clean(const DerivPtr& d);
DerivPtr make_clean(const DerivPtr& d);

// Renames every variable free in the conclusion to a fresh one (and all
// internal variables too); same structure, judgment equal up to renaming.
DerivPtr make_copy(const DerivPtr& d);
DerivPtr make_copy(const DerivPtr& d, std::map<std::string, std::string>& renames_out);

// Renames only variables not visible in the conclusion; conclusion intact.
DerivPtr freshen_internal(const DerivPtr& d);

// Renames free conclusion variables through the given map (and freshens the
// internal ones); no multiplexors are introduced, so types are untouched.
DerivPtr rename_free_deriv(const DerivPtr& d,
                           const std::map<std::string, std::string>& ren);

// Appends one multiplexor per group (xs -> y).
using Grouping = std::vector<std::pair<std::vector<std::string>, std::string>>;
DerivPtr make_instance(const DerivPtr& d, const Grouping& grouping);

// Derivable weakening at an arbitrary stratified type.
DerivPtr weaken(const DerivPtr& d, const std::string& x, const TypePtr& tau);

// x : sigma |- x : sigma, by a stratification tree over axioms.
DerivPtr var_typing(const std::string& x, const TypePtr& sigma);

struct StratSplit {
    std::vector<DerivPtr> premises;  // premises of the stratification node
    std::vector<DerivPtr> suffix;    // trailing unary W/M nodes, in application order
};

// Decomposes a derivation with set-typed conclusion into its stratification
// premises plus the renaming suffix below them.
StratSplit stratified_premises(const DerivPtr& d);

// Re-applies a recorded W/M suffix on top of base, recomputing judgments.
DerivPtr apply_suffix(DerivPtr base, const std::vector<DerivPtr>& suffix);

// Projects the i-th linear component (0-based, in canonical order) of the
// conclusion type, descending through stratifications.
DerivPtr linear_component_typing(const DerivPtr& d, size_t i);

std::set<std::string> ancestors(const std::string& x, const DerivPtr& d);

}  // namespace strw
