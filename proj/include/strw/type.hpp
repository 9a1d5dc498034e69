#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strw {

// Stratified types: a linear type (variable, arrow, forall) or a finite set
// of stratified types. Set semantics applies per nesting level: components
// are unordered and duplicate-free, but levels never flatten into each other.
struct StratType;
using TypePtr = std::shared_ptr<const StratType>;

struct StratType {
    enum class Kind { TyVar, Arrow, Forall, Strat };

    Kind kind;
    std::string name;             // TyVar; Forall binder
    TypePtr arg;                  // Arrow argument (any stratified type)
    TypePtr res;                  // Arrow result / Forall body (linear)
    std::vector<TypePtr> comps;   // Strat components, nonempty
};

TypePtr mk_tyvar(std::string name);
TypePtr mk_arrow(TypePtr arg, TypePtr res);
TypePtr mk_forall(std::string var, TypePtr body);
TypePtr mk_strat(std::vector<TypePtr> comps);

bool is_linear(const TypePtr& t);

std::string fresh_tyvar_name();

// Bumps the fresh-name counter past any reserved type-variable names in t
// (used when reloading serialized types).
void note_reserved_tyvars(const TypePtr& t);

struct TypeParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grammar: lin := tyvar | "forall" tyvar "." lin | strat "-o" lin ;
//          strat := lin | "{" strat ("," strat)* "}"
// "-o" is right-associative and binds tighter than "forall".
TypePtr parse_type(std::string_view text);
std::string print_type(const TypePtr& t);

// Structurally identical canonical form: every Strat level deduped and
// sorted; equal canonical keys iff the types are equal as set trees.
TypePtr canonicalize(const TypePtr& t);
std::string canonical_key(const TypePtr& t);
bool type_eq(const TypePtr& a, const TypePtr& b);

// Multiset of linear components, in canonical order.
std::vector<TypePtr> linear_components(const TypePtr& t);

// Wraps t in n singleton set layers; n = 0 is the identity.
TypePtr stratify_n(const TypePtr& t, int n);

// The set whose components are the given types (deduped): {s1,...,sn}.
TypePtr union_strat(const std::vector<TypePtr>& ss);

// Capture-avoiding replacement of free a by b; t and b must be linear.
TypePtr subst_tyvar(const TypePtr& t, const std::string& a, const TypePtr& b);

std::set<std::string> free_tyvars(const TypePtr& t);

using TypeContext = std::map<std::string, TypePtr>;

std::set<std::string> free_tyvars(const TypeContext& ctx);

// Pointwise union of singletons; all contexts must share one domain.
TypeContext context_union(const std::vector<TypeContext>& cs);

std::string print_context(const TypeContext& ctx);

}  // namespace strw
